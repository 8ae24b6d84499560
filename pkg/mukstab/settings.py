from pydantic_settings import BaseSettings, SettingsConfigDict

from mukstab.cache import CacheType


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix='MUKSTAB_')

    threads: int = 1
    cache_type: CacheType = CacheType.memory
    cache_size: int = 4096
    default_hbar: float = -2.0
    log_level: str = 'WARNING'
    sentry_dsn: str | None = None


settings = Settings()
