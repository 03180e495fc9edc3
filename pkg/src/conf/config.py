from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    prec_bits: int = Field(default=256, ge=64)
    tol: str = "1e-20"
    n_max: int = Field(default=48, ge=0)
    max_prec_bits: int = Field(default=16384, ge=64)
    probe_doublings: int = Field(default=2, ge=0)
    asc_n_switch: int = Field(default=8, ge=0)
    quad_min_nodes: int = Field(default=8, ge=4)
    quad_max_nodes: int = Field(default=4096, ge=8)
    max_terms: int = Field(default=200000, ge=16)
    q_grid: str = "0.05:0.05:0.90"
    log_level: str = "WARNING"

    model_config = SettingsConfigDict(
        env_prefix="HANKEL_INDET_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="allow",
    )


settings = Settings()
