"""YAML scenario repository implementation.

シナリオ文書（UTF-8 の YAML）を読み込み、検証済みの ScenarioDocument に変換します。
エラーには YAML 上の行番号とフィールドのパスを付けます。

数値には "pi"・"2pi"・"pi/2"・"0.5*pi" のような π を含む表記を使えます。
"""

import hashlib
import logging
import math
import re
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any

import yaml

from leafspec.domain.errors import ScenarioParseError, UnknownPresentationError
from leafspec.domain.models.presentation import PresentationDescriptor, PresentationFamily
from leafspec.domain.models.scenario import (
    DEFAULT_OUTPUTS,
    ComparisonSpec,
    MapKind,
    OutputArtifact,
    ScenarioDocument,
    SolverSettings,
)
from leafspec.domain.models.weight import (
    ConstantWeight,
    PolynomialTableWeight,
    PowerTrigWeight,
    SampledGridWeight,
    WeightProfile,
)
from leafspec.domain.repositories.scenario_repository import IScenarioRepository

logger = logging.getLogger(__name__)

_PI_PATTERN = re.compile(
    r"^\s*(?P<sign>[+-])?\s*(?P<factor>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*pi"
    r"\s*(?:/\s*(?P<divisor>\d+(?:\.\d+)?))?\s*$"
)

# 派生提示のキーと族
_DERIVED_KEYS: dict[str, PresentationFamily] = {
    "reflection_of": PresentationFamily.REFLECTION,
    "rescale_of": PresentationFamily.RESCALE,
    "same_as": PresentationFamily.RELABEL,
    "lift_of": PresentationFamily.COVERING_LIFT,
}

_BASE_FAMILIES: dict[str, PresentationFamily] = {
    "sphere_rotation": PresentationFamily.SPHERE_ROTATION,
    "orbifold_interval": PresentationFamily.ORBIFOLD_INTERVAL,
    "custom": PresentationFamily.CUSTOM,
}

_TOP_LEVEL_KEYS = frozenset({"presentations", "comparisons", "solver", "outputs"})


class _Locator:
    """フィールドのパスから YAML 上の行番号を引く"""

    def __init__(self, root: yaml.Node | None) -> None:
        self._lines: dict[str, int] = {}
        if root is not None:
            self._index(root, "")

    def _index(self, node: yaml.Node, path: str) -> None:
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                key = str(key_node.value)
                child = f"{path}.{key}" if path else key
                self._lines[child] = key_node.start_mark.line + 1
                self._index(value_node, child)
        elif isinstance(node, yaml.SequenceNode):
            for i, item in enumerate(node.value):
                child = f"{path}[{i}]"
                self._lines[child] = item.start_mark.line + 1
                self._index(item, child)

    def line(self, field: str) -> int | None:
        """フィールド（なければ最も近い親）の行番号"""
        path = field
        while path:
            if path in self._lines:
                return self._lines[path]
            cut = max(path.rfind("."), path.rfind("["))
            path = path[:cut] if cut > 0 else ""
        return None

    def error(self, message: str, field: str) -> ScenarioParseError:
        return ScenarioParseError(message, line=self.line(field), field=field)


class YamlScenarioRepository(IScenarioRepository):
    """Scenario repository reading YAML documents with PyYAML."""

    def load(self, path: Path) -> ScenarioDocument:
        """シナリオ文書を読み込む

        Args:
            path: シナリオファイルのパス

        Returns:
            ScenarioDocument: 検証済みのシナリオ

        Raises:
            FileNotFoundError: ファイルが存在しない場合
            ScenarioParseError: 構文または値が不正な場合
            UnknownPresentationError: 未宣言の提示を参照している場合
        """
        if not path.exists():
            raise FileNotFoundError(f"Scenario file not found: {path}")

        raw = path.read_bytes()
        digest = hashlib.sha256(raw).hexdigest()
        logger.info("Loading scenario %s (sha256 %s)", path, digest[:12])
        return self.parse(raw.decode("utf-8"), source_path=str(path), source_hash=digest)

    def parse(self, text: str, source_path: str = "", source_hash: str = "") -> ScenarioDocument:
        """文字列からシナリオを組み立てる

        Raises:
            ScenarioParseError: 構文または値が不正な場合
            UnknownPresentationError: 未宣言の提示を参照している場合
        """
        try:
            root = yaml.compose(text)
            document = yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            line = mark.line + 1 if mark is not None else None
            raise ScenarioParseError(f"invalid YAML: {e}", line=line) from e

        locator = _Locator(root)
        if document is None:
            raise ScenarioParseError("scenario is empty")
        if not isinstance(document, dict):
            raise ScenarioParseError("scenario must be a mapping at the top level", line=1)

        unknown = sorted(set(document) - _TOP_LEVEL_KEYS)
        if unknown:
            raise locator.error(f"unknown top-level keys: {', '.join(unknown)}", unknown[0])
        if "presentations" not in document:
            raise ScenarioParseError("Missing required key in scenario: presentations")

        presentations = _parse_presentations(document["presentations"], locator)
        comparisons = _parse_comparisons(document.get("comparisons") or [], locator)
        solver = _parse_solver(document.get("solver") or {}, locator)
        outputs = _parse_outputs(document.get("outputs"), locator)

        try:
            scenario = ScenarioDocument(
                presentations=presentations,
                comparisons=comparisons,
                solver=solver,
                outputs=outputs,
                source_hash=source_hash,
                source_path=source_path,
            )
        except UnknownPresentationError:
            raise
        except ValueError as e:
            raise ScenarioParseError(str(e), field="presentations") from e

        logger.info(
            "Scenario has %d presentations and %d comparisons",
            len(scenario.presentations),
            len(scenario.comparisons),
        )
        return scenario


def parse_number(raw: Any, field: str = "", locator: _Locator | None = None) -> float:
    """数値または π を含む表記を float に変換する

    Raises:
        ScenarioParseError: 数値として解釈できない場合
    """
    if isinstance(raw, bool):
        raise _error(f"expected a number, got {raw!r}", field, locator)
    if isinstance(raw, int | float):
        return float(raw)
    if isinstance(raw, str):
        match = _PI_PATTERN.match(raw.lower())
        if match is not None:
            factor = float(match["factor"]) if match["factor"] else 1.0
            if match["sign"] == "-":
                factor = -factor
            divisor = float(match["divisor"]) if match["divisor"] else 1.0
            if divisor == 0:
                raise _error(f"division by zero in {raw!r}", field, locator)
            return factor * math.pi / divisor
        try:
            return float(raw)
        except ValueError:
            pass
    raise _error(f"expected a number, got {raw!r}", field, locator)


def _error(message: str, field: str, locator: _Locator | None) -> ScenarioParseError:
    if locator is None:
        return ScenarioParseError(message, field=field or None)
    return locator.error(message, field)


def _parse_int(raw: Any, field: str, locator: _Locator) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise locator.error(f"expected an integer, got {raw!r}", field)
    return raw


def _parse_numbers(raw: Any, field: str, locator: _Locator) -> tuple[float, ...]:
    if not isinstance(raw, list):
        raise locator.error("expected an inline list of numbers", field)
    return tuple(parse_number(v, f"{field}[{i}]", locator) for i, v in enumerate(raw))


def _parse_pair(raw: Any, field: str, locator: _Locator) -> tuple[Any, Any]:
    if not isinstance(raw, list) or len(raw) != 2:
        raise locator.error(f"expected a pair [left, right], got {raw!r}", field)
    return raw[0], raw[1]


def _require(entry: Mapping[str, Any], key: str, path: str, locator: _Locator) -> Any:
    if key not in entry:
        raise locator.error(f"Missing required key: {key}", path)
    return entry[key]


def _parse_presentations(raw: Any, locator: _Locator) -> tuple[PresentationDescriptor, ...]:
    if not isinstance(raw, list) or not raw:
        raise locator.error("presentations must be a non-empty list", "presentations")

    descriptors: list[PresentationDescriptor] = []
    for i, entry in enumerate(raw):
        path = f"presentations[{i}]"
        if not isinstance(entry, dict):
            raise locator.error("presentation entry must be a mapping", path)
        descriptors.append(_parse_descriptor(entry, path, locator))
    return tuple(descriptors)


def _parse_descriptor(
    entry: Mapping[str, Any], path: str, locator: _Locator
) -> PresentationDescriptor:
    name = _require(entry, "name", path, locator)
    if not isinstance(name, str) or not name.strip():
        raise locator.error(f"name must be a non-empty string, got {name!r}", f"{path}.name")

    kinds = [key for key in ("family", *_DERIVED_KEYS) if key in entry]
    if len(kinds) != 1:
        raise locator.error(
            "exactly one of family, reflection_of, rescale_of, same_as, lift_of is required",
            path,
        )
    kind = kinds[0]

    if kind != "family":
        source = entry[kind]
        if not isinstance(source, str):
            raise locator.error(f"{kind} must name a presentation", f"{path}.{kind}")
        parameters: dict[str, Any] = {}
        if kind == "rescale_of":
            factor_field = f"{path}.factor"
            parameters["factor"] = parse_number(
                _require(entry, "factor", path, locator), factor_field, locator
            )
        elif kind == "lift_of":
            parameters["deck_order"] = _parse_int(
                _require(entry, "deck_order", path, locator), f"{path}.deck_order", locator
            )
        return PresentationDescriptor(name, _DERIVED_KEYS[kind], parameters, source)

    family_name = entry["family"]
    if family_name not in _BASE_FAMILIES:
        raise locator.error(
            f"unknown family {family_name!r} (known: {', '.join(_BASE_FAMILIES)})",
            f"{path}.family",
        )
    family = _BASE_FAMILIES[family_name]

    match family:
        case PresentationFamily.SPHERE_ROTATION:
            parameters = {
                "n": _parse_int(_require(entry, "n", path, locator), f"{path}.n", locator),
                "r": parse_number(entry.get("r", 1.0), f"{path}.r", locator),
            }
        case PresentationFamily.ORBIFOLD_INTERVAL:
            parameters = {
                "length": parse_number(
                    _require(entry, "length", path, locator), f"{path}.length", locator
                ),
                "regular_leaf_dim": _parse_int(
                    entry.get("regular_leaf_dim", 0), f"{path}.regular_leaf_dim", locator
                ),
            }
        case _:
            parameters = _parse_custom(entry, path, locator)

    return PresentationDescriptor(name, family, parameters, None)


def _parse_custom(entry: Mapping[str, Any], path: str, locator: _Locator) -> dict[str, Any]:
    dims = _parse_pair(
        _require(entry, "endpoint_leaf_dims", path, locator),
        f"{path}.endpoint_leaf_dims",
        locator,
    )
    flags = _parse_pair(
        entry.get("exceptional_endpoints", [False, False]),
        f"{path}.exceptional_endpoints",
        locator,
    )
    if not all(isinstance(flag, bool) for flag in flags):
        raise locator.error(
            "exceptional_endpoints must be booleans", f"{path}.exceptional_endpoints"
        )

    return {
        "kappa": parse_number(
            _require(entry, "kappa", path, locator), f"{path}.kappa", locator
        ),
        "weight": _parse_weight(
            _require(entry, "weight", path, locator), f"{path}.weight", locator
        ),
        "regular_leaf_dim": _parse_int(
            _require(entry, "regular_leaf_dim", path, locator),
            f"{path}.regular_leaf_dim",
            locator,
        ),
        "endpoint_leaf_dims": (
            _parse_int(dims[0], f"{path}.endpoint_leaf_dims[0]", locator),
            _parse_int(dims[1], f"{path}.endpoint_leaf_dims[1]", locator),
        ),
        "cover_order": _parse_int(entry.get("cover_order", 1), f"{path}.cover_order", locator),
        "exceptional_endpoints": (bool(flags[0]), bool(flags[1])),
    }


def _parse_weight(raw: Any, path: str, locator: _Locator) -> WeightProfile:
    if not isinstance(raw, dict):
        raise locator.error("weight must be a mapping with a form key", path)
    form = _require(raw, "form", path, locator)

    def get(key: str, default: Any = None) -> Any:
        if default is None:
            return _require(raw, key, path, locator)
        return raw.get(key, default)

    def number(key: str, default: float | None = None) -> float:
        return parse_number(get(key, default), f"{path}.{key}", locator)

    def integer(key: str, default: int | None = None) -> int:
        return _parse_int(get(key, default), f"{path}.{key}", locator)

    def numbers(key: str) -> tuple[float, ...]:
        return _parse_numbers(get(key), f"{path}.{key}", locator)

    def orders() -> tuple[int, int]:
        left, right = _parse_pair(raw.get("orders", [0, 0]), f"{path}.orders", locator)
        return (
            _parse_int(left, f"{path}.orders[0]", locator),
            _parse_int(right, f"{path}.orders[1]", locator),
        )

    try:
        match form:
            case "constant":
                return ConstantWeight(level=number("level", 1.0), length=number("length"))
            case "power_trig":
                return PowerTrigWeight(
                    sin_power=integer("sin_power"),
                    cos_power=integer("cos_power", 0),
                    scale=number("scale"),
                    length=number("length"),
                    coefficient=number("coefficient", 1.0),
                )
            case "polynomial_table":
                return PolynomialTableWeight(
                    nodes=numbers("nodes"),
                    values=numbers("values"),
                    slopes=numbers("slopes"),
                    declared_orders=orders(),
                )
            case "sampled_grid":
                return SampledGridWeight(
                    values=numbers("values"), length=number("length"), declared_orders=orders()
                )
            case _:
                raise locator.error(
                    f"unknown weight form {form!r} "
                    "(known: constant, power_trig, polynomial_table, sampled_grid)",
                    f"{path}.form",
                )
    except ScenarioParseError:
        raise
    except ValueError as e:
        raise locator.error(f"invalid weight: {e}", path) from e


def _parse_comparisons(raw: Any, locator: _Locator) -> tuple[ComparisonSpec, ...]:
    if not isinstance(raw, list):
        raise locator.error("comparisons must be a list", "comparisons")

    comparisons: list[ComparisonSpec] = []
    for i, entry in enumerate(raw):
        path = f"comparisons[{i}]"
        if not isinstance(entry, dict):
            raise locator.error("comparison entry must be a mapping", path)
        source = _require(entry, "source", path, locator)
        target = _require(entry, "target", path, locator)
        claimed = entry.get("claimed_codim_preserving", False)
        if not isinstance(claimed, bool):
            raise locator.error(
                "claimed_codim_preserving must be a boolean", f"{path}.claimed_codim_preserving"
            )

        mapping = entry.get("map", {})
        if mapping == "fold":
            comparisons.append(
                ComparisonSpec(
                    source=str(source),
                    target=str(target),
                    map_kind=MapKind.FOLD,
                    claimed_codim_preserving=claimed,
                )
            )
            continue
        if not isinstance(mapping, dict):
            raise locator.error(
                "map must be 'fold' or a mapping {orientation, offset}", f"{path}.map"
            )
        orientation = _parse_int(mapping.get("orientation", 1), f"{path}.map.orientation", locator)
        if orientation not in (1, -1):
            raise locator.error(
                f"orientation must be +1 or -1, got {orientation}", f"{path}.map.orientation"
            )
        offset = (
            parse_number(mapping["offset"], f"{path}.map.offset", locator)
            if "offset" in mapping
            else None
        )
        comparisons.append(
            ComparisonSpec(
                source=str(source),
                target=str(target),
                orientation=orientation,
                offset=offset,
                claimed_codim_preserving=claimed,
            )
        )
    return tuple(comparisons)


def _parse_solver(raw: Any, locator: _Locator) -> SolverSettings:
    if not isinstance(raw, dict):
        raise locator.error("solver must be a mapping", "solver")

    defaults: dict[str, Any] = {
        "grid_size": 2000,
        "eigen_count": 5,
        "tol_hyp": 1e-8,
        "tol_spec": 1e-2,
        "hyp_margin": 0.01,
    }
    unknown = sorted(set(raw) - set(defaults))
    if unknown:
        raise locator.error(f"unknown solver keys: {', '.join(unknown)}", f"solver.{unknown[0]}")
    merged: dict[str, Any] = {**defaults, **raw}

    grid_size = _parse_int(merged["grid_size"], "solver.grid_size", locator)
    eigen_count = _parse_int(merged["eigen_count"], "solver.eigen_count", locator)
    try:
        return SolverSettings(
            grid_size=grid_size,
            eigen_count=eigen_count,
            tol_hyp=parse_number(merged["tol_hyp"], "solver.tol_hyp", locator),
            tol_spec=parse_number(merged["tol_spec"], "solver.tol_spec", locator),
            hyp_margin=parse_number(merged["hyp_margin"], "solver.hyp_margin", locator),
        )
    except ScenarioParseError:
        raise
    except ValueError as e:
        raise locator.error(str(e), "solver") from e


def _parse_outputs(raw: Any, locator: _Locator) -> frozenset[OutputArtifact]:
    if raw is None:
        return DEFAULT_OUTPUTS
    if not isinstance(raw, Sequence) or isinstance(raw, str):
        raise locator.error("outputs must be a list", "outputs")

    known = {artifact.value: artifact for artifact in OutputArtifact}
    outputs: set[OutputArtifact] = set()
    for i, name in enumerate(raw):
        if name not in known:
            raise locator.error(
                f"unknown output {name!r} (known: {', '.join(known)})", f"outputs[{i}]"
            )
        outputs.add(known[name])
    return frozenset(outputs)
