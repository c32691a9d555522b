"""シナリオの提示カタログ

シナリオの記述子を宣言順に組み立て、名前で引ける提示の集合を作ります。
"""

import logging
from collections.abc import Iterator, Mapping

from leafspec.domain.errors import UnknownPresentationError
from leafspec.domain.models.presentation import FoliationPresentation
from leafspec.domain.models.scenario import ScenarioDocument
from leafspec.domain.services.presentation_factory import PresentationFactory

logger = logging.getLogger(__name__)


class PresentationCatalog:
    """Named presentations built from one scenario, in declaration order."""

    def __init__(self, presentations: Mapping[str, FoliationPresentation]) -> None:
        self._presentations = dict(presentations)

    @classmethod
    def from_scenario(
        cls, scenario: ScenarioDocument, factory: PresentationFactory | None = None
    ) -> "PresentationCatalog":
        """記述子から全ての提示を組み立てる

        Raises:
            ValueError: 提示のデータが不正な場合（NegativeCurvatureError など）
        """
        factory = factory or PresentationFactory()
        try:
            return cls(factory.make_catalog(scenario.presentations))
        except ValueError:
            logger.error(
                "Scenario %s has an invalid presentation", scenario.source_path or "<scenario>"
            )
            raise

    def get(self, name: str) -> FoliationPresentation:
        """名前から提示を引く

        Raises:
            UnknownPresentationError: 存在しない場合
        """
        if name not in self._presentations:
            raise UnknownPresentationError(
                f"presentation '{name}' is not declared (known: {', '.join(self.names)})"
            )
        return self._presentations[name]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._presentations)

    def __iter__(self) -> Iterator[FoliationPresentation]:
        return iter(self._presentations.values())

    def __len__(self) -> int:
        return len(self._presentations)
