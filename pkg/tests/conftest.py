"""
Fixtures compartidas: sistemas generados, estados y escenarios de ejemplo
"""
from pathlib import Path
from typing import Dict, Optional

import pytest

from app.models.momentos import SystemState, enumerate_moments
from app.services.ecuaciones_service import classical_system, generate

DIRECTORIO_ESCENARIOS = Path(__file__).resolve().parent.parent / "escenarios"


def estado_hidrogeno(
    r: float = 1.0,
    p_r: float = 0.0,
    theta: float = 0.0,
    p_theta: float = 1.0,
    orden: int = 2,
    momentos: Optional[Dict[str, float]] = None,
) -> SystemState:
    """Estado con todos los momentos de orden 2..N (cero salvo los indicados)"""
    valores = {idx: 0.0 for idx in enumerate_moments(2, orden)}
    for nombre, valor in (momentos or {}).items():
        idx = next(i for i in valores if i.nombre == nombre)
        valores[idx] = valor
    return SystemState(
        t=0.0,
        clasicas={"r": r, "p_r": p_r, "theta": theta, "p_theta": p_theta},
        momentos=valores,
    )


@pytest.fixture(scope="session")
def sistema2():
    return generate("hidrogeno", 2)


@pytest.fixture(scope="session")
def sistema3():
    return generate("hidrogeno", 3)


@pytest.fixture(scope="session")
def kepler(sistema2):
    """Sistema de segundo orden restringido a momentos nulos"""
    return classical_system(sistema2)


@pytest.fixture
def escenarios() -> Path:
    return DIRECTORIO_ESCENARIOS
