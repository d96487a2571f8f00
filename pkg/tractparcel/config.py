"""Configuration management."""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    LOG_LEVEL: str = "INFO"
    LOG_JSON_PATH: str | None = None

    RESAMPLE_POINTS: int = Field(default=100, ge=2, le=2048)
    COARSENING_LEVELS: int = Field(default=3, ge=3, le=8)
    CONV1_CHANNELS: int = Field(default=32, ge=1)
    CONV2_CHANNELS: int = Field(default=64, ge=1)
    FC_UNITS: int = Field(default=512, ge=1)

    LEARNING_RATE: float = Field(default=1e-3, gt=0)
    L2_COEFFICIENT: float = Field(default=1e-4, ge=0)
    BATCH_SIZE: int = Field(default=64, ge=1)
    MAX_EPOCHS: int = Field(default=200, ge=1)
    PATIENCE: int = Field(default=10, ge=1)
    TRAIN_WORKERS: int = Field(default=1, ge=1, le=64)
    REVERSE_AUGMENT: bool = True
    NEIGHBOR_MARGIN: float = Field(default=0.0, ge=0)

    VAL_FRACTION: float = Field(default=0.1, gt=0, lt=1)
    VOXEL_SIZE: float = Field(default=1.0, gt=0)
    THRESHOLD: float = Field(default=0.5, ge=0, le=1)
    PREDICT_BATCH_SIZE: int = Field(default=256, ge=1)


settings = Settings()
