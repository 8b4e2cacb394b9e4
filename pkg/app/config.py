"""
Configuración centralizada del simulador
Carga variables de entorno y constantes globales de las corridas
"""
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Configuración de la aplicación"""

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FILE: str = "logs/momentos.log"

    # Física (unidades del modelo)
    HBAR: float = 1.0
    R_MIN: float = 1e-6

    # Cota de |G| por encima de la cual la expansión truncada se da por agotada
    COTA_MOMENTOS: float = 1e6

    # Corchetes: "multigrado" (𝒦 multigrado con rango Ñ) o "moyal"
    NORMALIZACION_CORCHETE: str = "multigrado"

    # Oráculo de Weyl
    ORACULO_CAP: int = 6

    # Comparación numérica de sistemas
    SEMILLA_COMPARACION: int = 20240517
    ESTADOS_COMPARACION: int = 100

    # Monitores
    UMBRAL_VALIDEZ: float = 0.5
    P_FLOOR: float = 1e-3
    UMBRAL_2D: float = 1e-6
    TOLERANCIA_MARGEN: float = 1e-12

    # Salidas y barridos
    DIRECTORIO_SALIDA: str = "resultados"
    MAX_TRABAJADORES: int = 3

    class Config:
        env_file = ".env"
        case_sensitive = True


def get_settings() -> Settings:
    """Obtiene la configuración (sin cache para permitir recargas en tests)"""
    return Settings()


# Instancia global
settings = get_settings()
