from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache


class Settings(BaseSettings):
    """Process settings loaded from environment variables"""

    workers: int = 1
    log_level: str = "INFO"
    database_name: str = "runs.db"
    checkpoint_every: int = 50

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="PKGNET_",
        case_sensitive=False,
        extra="ignore",
    )


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()
