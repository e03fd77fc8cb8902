"""Configuration du laboratoire via Pydantic Settings."""

from pathlib import Path
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Configuration de indexlab (API, CLI et noyaux numériques)."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # === Environnement ===
    env: Literal["development", "production", "test"] = Field(
        default="development", description="Environnement d'exécution"
    )
    debug: bool = Field(default=False, description="Mode debug")
    seed: int = Field(default=42, description="Seed pour reproductibilité")

    # === API ===
    api_host: str = Field(default="0.0.0.0", description="Host de l'API")
    api_port: int = Field(default=8080, description="Port de l'API")
    api_reload: bool = Field(default=False, description="Rechargement auto en dev")
    api_version: str = Field(default="0.1.0", description="Version de l'API")
    cors_origins: str = Field(default="", description="CORS origins (séparés par virgule)")

    # === Logging ===
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(
        default="INFO", description="Niveau de log"
    )
    log_format: Literal["json", "text"] = Field(default="json", description="Format de log")

    # === Noyau complexe ===
    pole_tolerance: float = Field(
        default=1e-12, description="Seuil relatif |den| < tol·(1+|num|) pour un pôle"
    )
    root_cluster_tolerance: float = Field(
        default=1e-9, description="Tolérance de regroupement des racines communes"
    )
    lattice_truncation: int = Field(
        default=8, description="Troncature des sommes de réseau (lignes |n| ≤ N)"
    )

    # === Quadrature ===
    quad_abs_tol: float = Field(default=1e-8, description="Tolérance absolue des intégrales de chemin")
    excision_fraction: float = Field(
        default=1e-3, description="Part de ∫|κ| tolérée dans les disques excisés"
    )

    # === Spectral ===
    default_schedule: list[float] = Field(
        default=[10.0, 20.0, 40.0, 80.0, 160.0], description="Rayons extrinsèques R par défaut"
    )
    default_h: float = Field(
        default=0.098, description="Pas relatif du maillage (≈ 2π/64 en coordonnées log-polaires)"
    )
    stabilization_window: int = Field(
        default=3, description="Nombre d'étapes consécutives égales pour déclarer la stabilisation"
    )
    max_vertices: int = Field(default=200_000, description="Nombre maximal de sommets d'un maillage")
    dense_threshold: int = Field(
        default=500, description="Taille max pour la factorisation dense (Bunch-Kaufman)"
    )
    pivot_perturbation: float = Field(
        default=1e-12, description="Amplitude relative de la perturbation des pivots singuliers"
    )
    potential_rule: Literal["upper", "consistent", "lumped"] = Field(
        default="upper", description="Quadrature du potentiel 2κλ²"
    )
    eig_max_iter: int = Field(default=5000, description="Itérations max du solveur shift-invert")

    # === Parallélisme ===
    n_jobs: int = Field(default=1, description="Nombre de workers joblib (variable N_JOBS)")

    # === Chemins ===
    output_dir: Path = Field(default=Path("./output"), description="Répertoire des sorties")

    @property
    def cors_origins_list(self) -> list[str]:
        """Retourne la liste des origines CORS."""
        if not self.cors_origins:
            return []
        return [origin.strip() for origin in self.cors_origins.split(",") if origin.strip()]

    def ensure_directories(self) -> None:
        """Crée le répertoire de sortie s'il n'existe pas."""
        self.output_dir.mkdir(parents=True, exist_ok=True)


# Instance globale
settings = Settings()
