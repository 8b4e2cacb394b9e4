"""
Servicio del Hamiltoniano efectivo H_Q

Construye H_Q = H(x, p) + Σ ∂^{a₁+b₁+…}H/∂x^a∂p^b… · G^{a,b,…}/(a₁!b₁!…)
por desarrollo de Taylor exacto, y la forma cerrada del átomo de
hidrógeno en coordenadas polares planas.
"""
from dataclasses import dataclass
from math import factorial
from typing import Dict, Mapping, Optional, Tuple

from loguru import logger

from app.config import settings
from app.excepciones import EstadoIncompletoError, HamiltonianoNoSoportadoError, SingularidadError
from app.models.expresiones import SymbolicExpression, G, simbolo
from app.models.momentos import MomentIndex, SystemState, enumerate_moments

# Variables y parámetros del modelo de Kepler
R, PR, THETA, PTHETA = (simbolo(n) for n in ("r", "p_r", "theta", "p_theta"))
M, K = simbolo("m"), simbolo("k")


@dataclass(frozen=True)
class ClassicalModel:
    """
    Modelo clásico: pares canónicos, Hamiltoniano y parámetros simbólicos.

    Sólo las variables listadas en 'inversos' (y los parámetros) pueden
    aparecer con potencias negativas.
    """
    nombre: str
    pares: Tuple[Tuple[str, str], ...]
    hamiltoniano: SymbolicExpression
    parametros: Tuple[str, ...] = ()
    inversos: Tuple[str, ...] = ()

    @property
    def k(self) -> int:
        return len(self.pares)

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(v for par in self.pares for v in par)

    def validar(self) -> None:
        """Comprueba que H cabe en el lenguaje de términos"""
        h = self.hamiltoniano
        if h.momentos_presentes():
            raise HamiltonianoNoSoportadoError(f"{self.nombre}: el Hamiltoniano clásico no puede contener momentos")
        if h.tiene_imaginarios() or any(t.hbar for t in h.terminos):
            raise HamiltonianoNoSoportadoError(f"{self.nombre}: el Hamiltoniano clásico no depende de ħ")
        conocidos = set(self.variables) | set(self.parametros)
        for termino in h.terminos:
            for nombre, exp in termino.simbolos:
                if nombre not in conocidos:
                    raise HamiltonianoNoSoportadoError(f"{self.nombre}: símbolo desconocido {nombre!r}")
                if exp < 0 and nombre not in self.inversos and nombre not in self.parametros:
                    raise HamiltonianoNoSoportadoError(
                        f"{self.nombre}: potencia negativa de {nombre} no admitida"
                    )


def modelo_hidrogeno() -> ClassicalModel:
    """Kepler plano: p_r²/2m + p_θ²/(2mr²) − k/r"""
    hamiltoniano = PR ** 2 / (2 * M) + PTHETA ** 2 / (2 * M * R ** 2) - K / R
    return ClassicalModel(
        nombre="hidrogeno",
        pares=(("r", "p_r"), ("theta", "p_theta")),
        hamiltoniano=hamiltoniano,
        parametros=("m", "k"),
        inversos=("r",),
    )


def modelo_oscilador() -> ClassicalModel:
    """Oscilador armónico: p²/2m + mω²x²/2"""
    x, p, m, omega = (simbolo(n) for n in ("x", "p", "m", "omega"))
    return ClassicalModel(
        nombre="oscilador",
        pares=(("x", "p"),),
        hamiltoniano=p ** 2 / (2 * m) + m * omega ** 2 * x ** 2 / 2,
        parametros=("m", "omega"),
    )


MODELOS = {
    "hidrogeno": modelo_hidrogeno,
    "oscilador": modelo_oscilador,
}


def obtener_modelo(nombre: str) -> ClassicalModel:
    if nombre not in MODELOS:
        raise ValueError(f"Modelo desconocido {nombre!r}; disponibles: {sorted(MODELOS)}")
    return MODELOS[nombre]()


# ============================================================================
# CONSTRUCCIÓN DE H_Q
# ============================================================================

def build_HQ_taylor(model: ClassicalModel, N: int) -> SymbolicExpression:
    """
    H_Q por desarrollo de Taylor en todos los momentos de orden 2..N.

    Args:
        model: Modelo clásico
        N: Orden de truncamiento

    Returns:
        Expresión exacta de H_Q
    """
    model.validar()
    hq = model.hamiltoniano
    for idx in enumerate_moments(model.k, N):
        derivada = model.hamiltoniano
        normalizacion = 1
        for (q, p), (a, b) in zip(model.pares, idx.pares):
            for _ in range(a):
                derivada = derivada.derivar_simbolo(q)
            for _ in range(b):
                derivada = derivada.derivar_simbolo(p)
            normalizacion *= factorial(a) * factorial(b)
            if not derivada:
                break
        if derivada:
            hq = hq + derivada * SymbolicExpression.momento(idx) / normalizacion
    logger.debug(f"H_Q ({model.nombre}, N={N}): {len(hq)} términos")
    return hq


def build_HQ_hydrogen(max_a: Optional[int], max_b: Optional[int], N: int) -> SymbolicExpression:
    """
    Forma cerrada de H_Q para el hidrógeno.

    Las sumas infinitas quedan acotadas por el truncamiento (a ≤ N,
    b ≤ N − 1); max_a y max_b sólo pueden acotarlas aún más.

    Args:
        max_a: Cota de la suma en G^{a,0,0,0} (None = N)
        max_b: Cota de la suma en G^{b,0,0,1} y G^{b,0,0,2} (None = N − 1)
        N: Orden de truncamiento
    """
    max_a = N if max_a is None else min(max_a, N)
    max_b = N - 1 if max_b is None else min(max_b, N - 1)

    hq = (
        PR ** 2 / (2 * M) + PTHETA ** 2 / (2 * M * R ** 2) - K / R
        + G(0, 2, 0, 0) / (2 * M) + G(0, 0, 0, 2) / (2 * M * R ** 2)
    )
    for a in range(2, max_a + 1):
        hq = hq + (PTHETA ** 2 * (a + 1) / (2 * M * R) - K) * (-1) ** a / R ** (a + 1) * G(a, 0, 0, 0)
    for b in range(1, max_b + 1):
        hq = hq + (-1) ** b * (b + 1) / (M * R ** (b + 2)) * (PTHETA * G(b, 0, 0, 1) + G(b, 0, 0, 2) / 2)
    return hq.truncar(N)


def classical_limit(expr: SymbolicExpression) -> SymbolicExpression:
    """Todos los momentos a cero"""
    return expr.sin_momentos()


# ============================================================================
# EVALUACIÓN
# ============================================================================

def evaluate(
    expr: SymbolicExpression,
    state: SystemState,
    hbar: float,
    parametros: Optional[Mapping[str, float]] = None,
    r_min: Optional[float] = None,
) -> float:
    """
    Sustitución numérica determinista.

    Args:
        expr: Expresión a evaluar
        state: Estado que entrega cada símbolo usado
        hbar: Valor de ħ
        parametros: Valores de los parámetros del modelo (m, k, …)
        r_min: Guarda de singularidad (por defecto settings.R_MIN)

    Raises:
        SingularidadError: r ≤ r_min
        EstadoIncompletoError: falta un símbolo o momento
    """
    r_min = settings.R_MIN if r_min is None else r_min
    valores: Dict[str, float] = state.valores()
    valores.update(parametros or {})
    if "r" in expr.simbolos_presentes():
        if "r" not in valores:
            raise EstadoIncompletoError("Falta el símbolo 'r'")
        if valores["r"] <= r_min:
            raise SingularidadError(f"r = {valores['r']} ≤ r_min = {r_min}")
    return expr.evaluar(valores, hbar)
