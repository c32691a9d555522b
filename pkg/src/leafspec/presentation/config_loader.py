"""Runtime settings loader.

ワーカー数などの実行時設定を、コマンドライン引数・環境変数・既定値の順に解決します。
"""

import os
from collections.abc import Mapping
from dataclasses import dataclass

JOBS_ENV_VAR = "LEAFSPEC_JOBS"

# 既定のワーカー数の上限
DEFAULT_MAX_JOBS = 4


@dataclass(frozen=True)
class RuntimeSettings:
    """Runtime settings.

    Attributes:
        jobs: Number of worker threads (>= 1)
    """

    jobs: int

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")


def load_runtime_settings(
    cli_jobs: int | None = None, environ: Mapping[str, str] | None = None
) -> RuntimeSettings:
    """Resolve runtime settings.

    Args:
        cli_jobs: Value of --jobs (takes precedence)
        environ: Environment mapping (defaults to os.environ)

    Returns:
        RuntimeSettings instance

    Raises:
        ValueError: If LEAFSPEC_JOBS is not a positive integer
    """
    if cli_jobs is not None:
        return RuntimeSettings(jobs=cli_jobs)

    env = os.environ if environ is None else environ
    raw = env.get(JOBS_ENV_VAR)
    if raw is not None and raw.strip():
        try:
            jobs = int(raw)
        except ValueError as e:
            raise ValueError(f"{JOBS_ENV_VAR} must be an integer, got {raw!r}") from e
        return RuntimeSettings(jobs=jobs)

    return RuntimeSettings(jobs=min(DEFAULT_MAX_JOBS, os.cpu_count() or 1))
