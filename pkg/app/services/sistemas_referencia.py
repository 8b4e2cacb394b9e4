"""
Sistemas de referencia del hidrógeno transcritos a mano

Copia término a término de los sistemas impresos de segundo y tercer
orden, con p_θ → l y G^{0,0,0,2} → Δl² tal como aparecen. Los términos iħ
del sistema de tercer orden se conservan marcados como imaginarios; las
erratas aparentes (prefactores ausentes, potencias de r) se dejan tal cual
para que la comparación las aísle.

El listado de tercer orden omite r, p_θ, G^{2,0,0,0}, G^{1,0,0,1} (iguales a
segundo orden) y no imprime G^{0,0,2,1} ni G^{0,0,1,2}; estas dos quedan
sin transcripción (lado derecho nulo) y se anotan en los metadatos.
"""
from typing import Dict

from app.models.expresiones import G, SymbolicExpression
from app.services.ecuaciones_service import EffectiveSystem, variables_del_sistema
from app.services.hamiltoniano_service import K, M, PR, R, build_HQ_hydrogen, modelo_hidrogeno

L = SymbolicExpression.simbolo("p_theta")
DL2 = G(0, 0, 0, 2)
IH = SymbolicExpression.i_hbar()
CERO = SymbolicExpression.cero()

# [3l²/(2mr) − k] y [2l²/(mr) − k]
A2 = 3 * L ** 2 / (2 * M * R) - K
A3 = 2 * L ** 2 / (M * R) - K


def _segundo_orden() -> Dict[str, SymbolicExpression]:
    return {
        "r": PR / M,
        "p_r": (
            L ** 2 / (M * R ** 3) - K / R ** 2 + DL2 / (M * R ** 3)
            + 3 / R ** 4 * G(2, 0, 0, 0) * (L ** 2 / M * 2 / R - K)
            - 6 * L / (M * R ** 4) * G(1, 0, 0, 1)
        ),
        "theta": L / (M * R ** 2) - 2 / (M * R ** 3) * G(1, 0, 0, 1) + 3 * L / (M * R ** 4) * G(2, 0, 0, 0),
        "p_theta": CERO,
        "G_1_1_0_0": (
            -G(0, 2, 0, 0) / M + A2 * 2 / R ** 3 * G(2, 0, 0, 0)
            - 2 * L / (M * R ** 3) * G(1, 0, 0, 1)
        ),
        "G_2_0_0_0": -2 / M * G(1, 1, 0, 0),
        "G_0_2_0_0": 4 * A2 / R ** 3 * G(1, 1, 0, 0) - 4 * L / (M * R ** 3) * G(0, 1, 0, 1),
        "G_0_0_1_1": -G(0, 0, 0, 2) / (M * R ** 2) + 2 * L / (M * R ** 3) * G(1, 0, 0, 1),
        "G_0_0_2_0": -2 / (M * R ** 2) * G(0, 0, 1, 1) + 4 * L / (M * R ** 3) * G(1, 0, 1, 0),
        "G_0_0_0_2": CERO,
        "G_1_0_1_0": (
            -G(0, 1, 1, 0) / M - G(1, 0, 0, 1) / (M * R ** 2)
            + 2 * L / (M * R ** 3) * G(2, 0, 0, 0)
        ),
        "G_1_0_0_1": -G(0, 1, 0, 1) / M,
        "G_0_1_0_1": A2 * 2 / R ** 3 * G(1, 0, 0, 1) - 2 * L / (M * R ** 3) * G(0, 0, 0, 2),
        "G_0_1_1_0": (
            -G(0, 1, 0, 1) / (M * R ** 2) + A2 * 2 / R ** 3 * G(1, 0, 1, 0)
            + 2 * L / (M * R ** 3) * (G(1, 1, 0, 0) - G(0, 0, 1, 1))
        ),
    }


def _tercer_orden() -> Dict[str, SymbolicExpression]:
    previas = _segundo_orden()
    rhs = {
        "r": previas["r"],
        "p_theta": CERO,
        "G_2_0_0_0": previas["G_2_0_0_0"],
        "G_1_0_0_1": previas["G_1_0_0_1"],
        "G_0_0_0_2": CERO,
        "p_r": (
            L ** 2 / (M * R ** 3) - K / R ** 2 + DL2 / (M * R ** 3)
            + 3 / R ** 4 * G(2, 0, 0, 0) * (L ** 2 / M * 2 / R - K)
            - 4 / R ** 5 * G(3, 0, 0, 0) * (L ** 2 / M * 5 / R - K)
            - 6 / (M * R ** 4) * (L * G(1, 0, 0, 1) + G(1, 0, 0, 2) / 2)
            + 12 * L / (M * R ** 5) * G(2, 0, 0, 1)
        ),
        "theta": (
            L / (M * R ** 2) - 2 / (M * R ** 3) * G(1, 0, 0, 1)
            + 3 / (M * R ** 4) * (L * G(2, 0, 0, 0) + G(2, 0, 0, 1))
            - 4 * L / (M * R ** 5) * G(3, 0, 0, 0)
        ),
        "G_1_1_0_0": (
            -G(0, 2, 0, 0) / M + A2 * 2 / R ** 3 * G(2, 0, 0, 0) - A3 * 3 / R ** 4 * G(3, 0, 0, 0)
            - 2 / (M * R ** 3) * (L * G(1, 0, 0, 1) + G(1, 0, 0, 2) / 2)
            + 6 * L * G(2, 0, 0, 1) / (M * R ** 4)
        ),
        "G_0_2_0_0": (
            4 * A2 / R ** 3 * G(1, 1, 0, 0) - 6 * A3 / R ** 4 * G(2, 1, 0, 0)
            - 2 / (M * R ** 3) * (2 * L * G(0, 1, 0, 1) + G(0, 1, 0, 2))
            + 12 * L / (M * R ** 4) * G(1, 1, 0, 1)
        ),
        "G_0_0_1_1": (
            -DL2 / (M * R ** 2) + 2 / (M * R ** 3) * (L * G(1, 0, 0, 1) + G(1, 0, 0, 2))
            - 3 * L / (M * R ** 4) * G(2, 0, 0, 1)
        ),
        "G_0_0_2_0": (
            -2 / (M * R ** 2) * G(0, 0, 1, 1) + 4 / (M * R ** 3) * (L * G(1, 0, 1, 0) + G(1, 0, 1, 1))
            - 6 * L / (M * R ** 4) * G(2, 0, 1, 0)
        ),
        "G_1_0_1_0": (
            -G(0, 1, 1, 0) / M - G(1, 0, 0, 1) / (M * R ** 2)
            + 2 / (M * R ** 3) * (L * G(2, 0, 0, 0) + G(2, 0, 0, 1))
            - 3 * L / (M * R ** 4) * G(3, 0, 0, 0)
        ),
        "G_0_1_0_1": (
            A2 * 2 / R ** 3 * G(1, 0, 0, 1) - A3 * 2 / R ** 4 * G(2, 0, 0, 1)
            - 1 / (M * R ** 3) * (2 * L * DL2 - G(0, 0, 0, 3))
            + 6 * L / (M * R ** 4) * G(1, 0, 0, 2)
        ),
        "G_0_1_1_0": (
            -G(0, 1, 0, 1) / (M * R ** 2) + A2 * 2 / R ** 3 * G(1, 0, 1, 0)
            + 1 / (M * R ** 3) * (2 * L * (G(1, 1, 0, 0) - G(0, 0, 1, 1)))
            - (G(0, 0, 1, 2) - 2 * G(1, 1, 0, 1))
            - A3 * 3 / R ** 3 * G(2, 0, 1, 0)
            + 3 * L / (M * R ** 4) * (2 * G(1, 0, 1, 1) - G(2, 1, 0, 0))
        ),
        # Dieciocho ecuaciones adicionales
        "G_1_1_1_0": (
            -G(0, 2, 1, 0) / M - G(1, 1, 0, 1) / (M * R ** 2)
            + 3 / R ** 4 * A3 * G(1, 0, 1, 0) * G(2, 0, 0, 0)
            + 2 / R ** 3 * A2 * G(2, 0, 1, 0)
            + 3 / (M * R ** 4) * (
                L * (-2 * G(1, 0, 0, 1) * G(1, 0, 1, 0) + G(1, 1, 0, 0) * G(2, 0, 0, 0))
                - (G(1, 0, 0, 2) * G(1, 0, 1, 0) - G(1, 1, 0, 0) * G(2, 0, 0, 1))
            )
            - 1 / (M * R ** 3) * 2 * (
                (-DL2 * G(1, 0, 1, 0) + 2 * G(1, 0, 0, 1) * G(1, 1, 0, 0)) / 2
                + L * (G(1, 0, 1, 1) - G(2, 1, 0, 0))
            )
        ),
        "G_1_1_0_1": (
            -G(0, 2, 0, 1) / M
            + (DL2 * G(1, 0, 0, 1) - 2 * L * G(1, 0, 0, 2)) / (M * R ** 3)
            - 3 * (2 * L * G(1, 0, 0, 1) ** 2 + G(1, 0, 0, 1) * G(1, 0, 0, 2)) / (M * R ** 4)
            + 3 / R ** 4 * A3 * G(1, 0, 0, 1) * G(2, 0, 0, 0)
            + 2 / R ** 3 * A2 * G(2, 0, 0, 1)
        ),
        "G_1_0_1_1": (
            -G(0, 1, 1, 1) / M - G(1, 0, 0, 2) / (M * R ** 2)
            + 3 * (L * G(1, 0, 0, 1) * G(2, 0, 0, 0) + G(1, 0, 0, 1) * G(2, 0, 0, 1)) / (M * R ** 4)
            - 2 * (G(1, 0, 0, 1) ** 2 - L * G(2, 0, 0, 1)) / (M * R ** 3)
        ),
        "G_0_1_1_1": (
            -G(0, 1, 0, 2) / (M * R ** 2)
            + 2 / R ** 3 * A2 * G(1, 0, 1, 1)
            + 3 / R ** 4 * A3 * G(0, 0, 1, 1) * G(2, 0, 0, 0)
            + 3 / (M * R ** 4) * (
                L * (-2 * G(0, 0, 1, 1) * G(1, 0, 0, 1) + G(0, 1, 0, 1) * G(2, 0, 0, 0))
                - (G(0, 0, 1, 1) * G(1, 0, 0, 2) - G(0, 1, 0, 1) * G(2, 0, 0, 1))
            )
            - 1 / (M * R ** 3) * (
                (-DL2 * G(0, 0, 1, 1) + 2 * G(0, 1, 0, 1) * G(1, 0, 0, 1))
                + 2 * L * (G(0, 0, 1, 2) - G(1, 1, 0, 1))
            )
        ),
        "G_1_2_0_0": (
            -G(0, 3, 0, 0) / M
            - 3 * (4 * L * G(1, 0, 0, 1) * G(1, 1, 0, 0) + 2 * G(1, 0, 0, 2) * G(1, 1, 0, 0)) / (M * R ** 4)
            + 2 * (DL2 * G(1, 1, 0, 0) - 2 * L * G(1, 1, 0, 1)) / (M * R ** 3)
            + 6 / R ** 4 * A3 * G(1, 1, 0, 0) * G(2, 0, 0, 0)
            + 4 / R ** 3 * A2 * G(2, 1, 0, 0)
        ),
        "G_1_0_2_0": (
            -G(0, 1, 2, 0) / M
            + 6 * G(1, 0, 1, 0) * (L * G(2, 0, 0, 0) + G(2, 0, 0, 1)) / (M * R ** 4)
            - 4 * (G(1, 0, 0, 1) * G(1, 0, 1, 0) - L * G(2, 0, 1, 0)) / (M * R ** 3)
        ),
        "G_1_0_0_2": -G(0, 1, 0, 2) / M,
        "G_0_1_0_2": (
            (DL2 ** 2 - 2 * L * G(0, 0, 0, 3)) / (M * R ** 3)
            + 2 / R ** 3 * A2 * G(1, 0, 0, 2)
            + 3 / R ** 4 * A3 * DL2 * G(2, 0, 0, 0)
            - 3 * DL2 * (2 * L * G(1, 0, 0, 1) + G(1, 0, 0, 2)) / (M * R ** 4)
        ),
        "G_0_1_2_0": (
            -2 * G(0, 1, 1, 1) / (M * R ** 2)
            + 2 / R ** 3 * A2 * G(1, 0, 2, 0)
            + 3 / R ** 4 * A3 * G(0, 0, 2, 0) * G(2, 0, 0, 0)
            - 2 / (M * R ** 3) * (
                (2 * G(0, 1, 1, 0) * G(1, 0, 0, 1) - DL2 * G(0, 0, 2, 0)
                 + IH / 2 * (G(1, 1, 0, 0) - 2 * G(0, 0, 1, 1)))
                + L * (G(0, 0, 2, 1) - 2 * G(1, 1, 1, 0))
            )
            + 3 / (M * R ** 4) * (
                (2 * G(0, 1, 1, 0) * G(2, 0, 0, 1) - G(0, 0, 2, 0) * G(1, 0, 0, 2)
                 + IH / 2 * (G(2, 1, 0, 0) - 4 * G(1, 0, 1, 1)))
                + 2 * L * (G(0, 1, 1, 0) * G(2, 0, 0, 0) - G(0, 0, 2, 0) * G(1, 0, 0, 1))
            )
        ),
        "G_0_2_0_1": (
            2 * (DL2 * G(0, 1, 0, 1) - 2 * L * G(0, 1, 0, 2)) / (M * R ** 3)
            - 6 * (2 * L * G(0, 1, 0, 1) * G(1, 0, 0, 1) + G(0, 1, 0, 1) * G(1, 0, 0, 2)) / (M * R ** 4)
            + 4 / R ** 3 * A2 * G(1, 1, 0, 1)
            + 6 / R ** 4 * A3 * G(0, 1, 0, 1) * G(2, 0, 0, 0)
        ),
        "G_0_2_1_0": (
            -G(0, 2, 0, 1) / (M * R ** 2)
            - 4 / R ** 3 * (K - 3 * L ** 2 / (2 * M * R)) * (G(1, 1, 1, 0) - G(0, 1, 1, 0) * G(1, 0, 0, 0))
            - 6 / R ** 4 * (K - 2 * L ** 2 / (M * R)) * G(0, 1, 1, 0) * G(2, 0, 0, 0)
            - 2 / (M * R ** 3) * (
                (G(0, 2, 0, 0) * G(1, 0, 0, 1) - DL2 * G(0, 1, 1, 0))
                + L * (2 * G(0, 1, 1, 1) - G(1, 2, 0, 0))
            )
            + 3 / (M * R ** 4) * (
                L * (G(0, 2, 0, 0) * G(2, 0, 0, 0) - 4 * G(0, 1, 1, 0) * G(1, 0, 0, 1)
                     + IH * (G(0, 0, 1, 1) - 2 * G(1, 1, 0, 0)))
                + (G(0, 2, 0, 0) * G(2, 0, 0, 1) - 2 * G(0, 1, 1, 0) * G(1, 0, 0, 2)
                   + IH / 2 * (G(0, 0, 1, 2) - 4 * G(1, 1, 0, 1)))
            )
        ),
        "G_2_0_0_1": -2 * G(1, 1, 0, 1) / M,
        "G_2_0_1_0": (
            -2 * G(1, 1, 1, 0) / M - G(2, 0, 0, 1) / (M * R ** 2)
            + 3 * (L * G(2, 0, 0, 0) ** 2 + G(2, 0, 0, 0) * G(2, 0, 0, 1)) / (M * R ** 4)
            - 2 * (G(1, 0, 0, 1) * G(2, 0, 0, 0) - L * G(3, 0, 0, 0)) / (M * R ** 3)
        ),
        "G_2_1_0_0": (
            -2 * G(1, 2, 0, 0) / M
            + 3 / R ** 4 * A3 * G(2, 0, 0, 0) ** 2
            + 2 / R ** 3 * A2 * G(3, 0, 0, 0)
            + (DL2 * G(2, 0, 0, 0) - 2 * L * G(2, 0, 0, 1)) / (M * R ** 3)
            - 3 * (2 * L * G(1, 0, 0, 1) * G(2, 0, 0, 0) + G(1, 0, 0, 2) * G(2, 0, 0, 0)) / (M * R ** 4)
        ),
        "G_0_0_0_3": CERO,
        "G_0_0_3_0": (
            -3 * G(0, 0, 2, 1) / (M * R ** 2)
            - 6 * (G(0, 0, 2, 0) * G(1, 0, 0, 1) - L * G(1, 0, 2, 0)) / (M * R ** 3)
            + 9 * (L * G(0, 0, 2, 0) * G(2, 0, 0, 0) + G(0, 0, 2, 0) * G(2, 0, 0, 1)) / (M * R ** 4)
        ),
        "G_0_3_0_0": (
            (3 * DL2 * G(0, 2, 0, 0) - 6 * L * G(0, 2, 0, 1)) / (M * R ** 3)
            + 6 / R ** 3 * A2 * G(1, 2, 0, 0)
            - 9 * (2 * L * G(0, 2, 0, 0) * G(1, 0, 0, 1) + G(0, 2, 0, 0) * G(1, 0, 0, 2)) / (M * R ** 4)
            + 9 / R ** 4 * (K - 2 * L ** 2 / (M * R)) * (IH * G(1, 1, 0, 0) - G(0, 2, 0, 0) * G(2, 0, 0, 0))
        ),
        "G_3_0_0_0": -3 * G(2, 1, 0, 0) / M,
        # Sin transcripción impresa
        "G_0_0_2_1": CERO,
        "G_0_0_1_2": CERO,
    }
    return rhs


def reference_system(order: int) -> EffectiveSystem:
    """
    Sistema impreso de segundo (12 ecuaciones vivas) o tercer orden.

    Args:
        order: 2 o 3

    Returns:
        EffectiveSystem con las mismas variables que generate(hidrogeno, order)
    """
    if order not in (2, 3):
        raise ValueError(f"Sólo hay transcripciones de orden 2 y 3 (recibido {order})")
    modelo = modelo_hidrogeno()
    variables = variables_del_sistema(modelo, order)
    rhs = _segundo_orden() if order == 2 else _tercer_orden()
    faltantes = set(variables) ^ set(rhs)
    if faltantes:
        raise RuntimeError(f"Transcripción incompleta: {sorted(faltantes)}")
    metadatos = {"origen": "transcripcion"}
    if order == 3:
        metadatos["sin_transcripcion"] = "G_0_0_2_1,G_0_0_1_2"
    return EffectiveSystem(
        modelo=modelo.nombre,
        orden=order,
        pares=modelo.pares,
        variables=variables,
        rhs=rhs,
        parametros=modelo.parametros,
        hamiltoniano=build_HQ_hydrogen(None, None, order),
        metadatos=metadatos,
    )
