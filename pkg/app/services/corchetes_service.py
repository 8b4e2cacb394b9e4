"""
Servicio de Corchetes de Poisson entre momentos

Calcula con coeficientes racionales exactos:
- el corchete entre dos momentos centrales de k grados de libertad,
- el corchete de variables clásicas con variables clásicas o momentos,
- la extensión bilineal (regla de Leibniz) a expresiones polinomiales.

Dos normalizaciones del término cuántico comparten la misma suma sobre
(n, s, e):
- "multigrado": coeficiente 𝒦 multigrado con n ≤ Ñ (reproduce los
  sistemas impresos de hidrógeno),
- "moyal": peso Π u_i! v_i! con n ≤ Σ(min(a,d) + min(b,c)), el que se
  obtiene de los conmutadores canónicos; coincide con K^n de un grado de
  libertad para todo n.
Ambas coinciden en todos los términos con n = 1.
"""
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, product
from math import comb, factorial
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from loguru import logger

from app.config import settings
from app.excepciones import (
    ConfiguracionInvalidaError,
    ConfiguracionMalformadaError,
    OrdenInvalidoError,
)
from app.models.expresiones import SymbolicExpression
from app.models.momentos import MomentIndex, enumerate_moments
from app.schemas.schemas_reportes import ReporteJacobi, TripleJacobi


class NormalizacionCorchete(str, Enum):
    """Normalización del término cuántico del corchete"""
    MULTIGRADO = "multigrado"
    MOYAL = "moyal"


def binomial(x: int, y: int) -> int:
    """C(x, y) con C(x, y) = 0 si y < 0 o y > x"""
    if y < 0 or x < 0 or y > x:
        return 0
    return comb(x, y)


# ============================================================================
# COEFICIENTES
# ============================================================================

def _validar_n(n: int) -> None:
    if n < 1 or n % 2 == 0:
        raise OrdenInvalidoError(f"n debe ser impar y ≥ 1 (recibido {n})")


def k_coefficient_1dof(n: int, a: int, b: int, c: int, d: int) -> Fraction:
    """
    Coeficiente K^n_{abcd} de un grado de libertad.

    K^n = Σ_s (−1)^s s!(n−s)! C(a,s) C(b,n−s) C(c,n−s) C(d,s)
    """
    _validar_n(n)
    total = 0
    for s in range(n + 1):
        total += (
            (-1) ** s * factorial(s) * factorial(n - s)
            * binomial(a, s) * binomial(b, n - s) * binomial(c, n - s) * binomial(d, s)
        )
    return Fraction(total)


def cota_e(n: int, s: int, a: int, b: int, c: int, d: int) -> int:
    """Cota superior de e_i: min(a_i, d_i, s) + min(b_i, c_i, n − s)"""
    return min(a, d, s) + min(b, c, n - s)


def _rango_g(n: int, s: int, e: int, a: int, b: int, c: int, d: int) -> range:
    inferior = max(e - s, e - a, e - d, 0)
    superior = min(b, c, n - s, e)
    return range(inferior, superior + 1)


def _configuraciones_g(n: int, s: int, e: Sequence[int], a, b, c, d) -> Iterator[Tuple[int, ...]]:
    rangos = [_rango_g(n, s, e[i], a[i], b[i], c[i], d[i]) for i in range(len(e))]
    for g in product(*rangos):
        if sum(g) == n - s:
            yield g


def _validar_configuracion(n, s, e, a, b, c, d) -> None:
    _validar_n(n)
    if not 0 <= s <= n:
        raise ConfiguracionInvalidaError(f"s = {s} fuera de 0..{n}")
    if not (len(e) == len(a) == len(b) == len(c) == len(d)):
        raise ConfiguracionInvalidaError("Listas por grado de libertad de distinto largo")
    if sum(e) != n:
        raise ConfiguracionInvalidaError(f"Σe_i = {sum(e)} ≠ n = {n}")
    for i, e_i in enumerate(e):
        if not 0 <= e_i <= cota_e(n, s, a[i], b[i], c[i], d[i]):
            raise ConfiguracionInvalidaError(
                f"e_{i + 1} = {e_i} fuera de [0, {cota_e(n, s, a[i], b[i], c[i], d[i])}]"
            )


def kcal_coefficient(
    n: int,
    s: int,
    e: Sequence[int],
    a: Sequence[int],
    b: Sequence[int],
    c: Sequence[int],
    d: Sequence[int],
) -> Fraction:
    """
    Coeficiente 𝒦^{n,s,{e}} multigrado.

    Suma sobre configuraciones g con Σg_i = n − s dentro de
    max(e_i − s, e_i − a_i, e_i − d_i, 0) ≤ g_i ≤ min(b_i, c_i, n − s, e_i);
    cada factor es C(a_i, e_i−g_i) C(b_i, g_i) C(c_i, g_i) C(d_i, e_i−g_i)
    / (C(n−s, g_i) C(s, e_i−g_i)), y la suma se divide por s!(n−s)!.

    Raises:
        ConfiguracionInvalidaError: e fuera de cotas o Σe ≠ n
        ConfiguracionMalformadaError: denominador nulo con numerador no nulo
    """
    _validar_configuracion(n, s, e, a, b, c, d)
    total = Fraction(0)
    for g in _configuraciones_g(n, s, e, a, b, c, d):
        factor = Fraction(1)
        for i, g_i in enumerate(g):
            u_i = e[i] - g_i
            numerador = binomial(a[i], u_i) * binomial(b[i], g_i) * binomial(c[i], g_i) * binomial(d[i], u_i)
            denominador = binomial(n - s, g_i) * binomial(s, u_i)
            if denominador == 0:
                if numerador:
                    raise ConfiguracionMalformadaError(
                        f"Denominador nulo en g = {g} (n={n}, s={s}, e={tuple(e)})"
                    )
                factor = Fraction(0)
                break
            factor *= Fraction(numerador, denominador)
        total += factor
    return total / (factorial(s) * factorial(n - s))


def peso_moyal(
    n: int,
    s: int,
    e: Sequence[int],
    a: Sequence[int],
    b: Sequence[int],
    c: Sequence[int],
    d: Sequence[int],
) -> Fraction:
    """Peso Σ_g Π u_i! g_i! C(a_i,u_i) C(b_i,g_i) C(c_i,g_i) C(d_i,u_i), u_i = e_i − g_i"""
    _validar_configuracion(n, s, e, a, b, c, d)
    total = 0
    for g in _configuraciones_g(n, s, e, a, b, c, d):
        termino = 1
        for i, g_i in enumerate(g):
            u_i = e[i] - g_i
            termino *= (
                factorial(u_i) * factorial(g_i)
                * binomial(a[i], u_i) * binomial(b[i], g_i) * binomial(c[i], g_i) * binomial(d[i], u_i)
            )
        total += termino
    return Fraction(total)


def suma_minimos(A: MomentIndex, B: MomentIndex) -> int:
    return sum(
        min(a, d) + min(b, c)
        for (a, b), (c, d) in zip(A.pares, B.pares)
    )


def n_maximo(A: MomentIndex, B: MomentIndex, normalizacion: NormalizacionCorchete) -> int:
    """Mayor n impar admitido en la suma cuántica"""
    total = suma_minimos(A, B)
    if normalizacion == NormalizacionCorchete.MOYAL:
        return total
    return 1 if total <= 1 else total - 1


def factor_i_hbar(n: int) -> SymbolicExpression:
    """(iħ/2)^{n−1} con n impar: (−1)^{(n−1)/2} (ħ/2)^{n−1}"""
    potencia = n - 1
    signo = -1 if (potencia // 2) % 2 else 1
    return SymbolicExpression.potencia_hbar(potencia) * Fraction(signo, 2 ** potencia)


# ============================================================================
# CORCHETE ENTRE MOMENTOS
# ============================================================================

def _vectores_e(n: int, s: int, a, b, c, d) -> Iterator[Tuple[int, ...]]:
    rangos = [range(cota_e(n, s, a[i], b[i], c[i], d[i]) + 1) for i in range(len(a))]
    for e in product(*rangos):
        if sum(e) == n:
            yield e


@lru_cache(maxsize=None)
def _bracket_moments(A: MomentIndex, B: MomentIndex, normalizacion: NormalizacionCorchete) -> SymbolicExpression:
    if A.k != B.k:
        raise ValueError(f"{A} y {B} no comparten el número de grados de libertad")
    a, b = list(A.indices[0::2]), list(A.indices[1::2])
    c, d = list(B.indices[0::2]), list(B.indices[1::2])
    k = A.k
    resultado = SymbolicExpression.cero()

    # Términos producto clásicos
    for i in range(k):
        if a[i] and d[i]:
            resultado = resultado + (
                SymbolicExpression.momento(A.desplazar(2 * i, -1))
                * SymbolicExpression.momento(B.desplazar(2 * i + 1, -1))
                * (a[i] * d[i])
            )
        if b[i] and c[i]:
            resultado = resultado - (
                SymbolicExpression.momento(A.desplazar(2 * i + 1, -1))
                * SymbolicExpression.momento(B.desplazar(2 * i, -1))
                * (b[i] * c[i])
            )

    # Suma cuántica sobre n impar, s y e
    peso = kcal_coefficient if normalizacion == NormalizacionCorchete.MULTIGRADO else peso_moyal
    for n in range(1, n_maximo(A, B, normalizacion) + 1, 2):
        prefactor = factor_i_hbar(n)
        for s in range(n + 1):
            for e in _vectores_e(n, s, a, b, c, d):
                coef = peso(n, s, e, a, b, c, d)
                if not coef:
                    continue
                indices = []
                for i in range(k):
                    indices.extend((a[i] + c[i] - e[i], b[i] + d[i] - e[i]))
                resultado = resultado + (
                    SymbolicExpression.momento(MomentIndex(tuple(indices)))
                    * prefactor * ((-1) ** s * coef)
                )
    return resultado


def bracket_moments(
    A: MomentIndex,
    B: MomentIndex,
    normalizacion: Union[NormalizacionCorchete, str, None] = None,
) -> SymbolicExpression:
    """
    Corchete exacto {G^A, G^B}.

    Args:
        A, B: Multi-índices sobre el mismo k
        normalizacion: "multigrado" o "moyal" (por defecto la de settings)

    Returns:
        SymbolicExpression con ħ simbólico; órdenes 0 y 1 ya sustituidos
    """
    normalizacion = NormalizacionCorchete(normalizacion or settings.NORMALIZACION_CORCHETE)
    return _bracket_moments(A, B, normalizacion)


def consistencia_un_grado(max_orden: int = 4) -> List[Tuple[MomentIndex, MomentIndex]]:
    """
    Compara, para k = 1, el término n = 1 de K^1 con la suma multigrado.

    Returns:
        Pares (A, B) donde las dos formas difieren (vacío si son consistentes)
    """
    fallas = []
    indices = [MomentIndex((a, o - a)) for o in range(2, max_orden + 1) for a in range(o, -1, -1)]
    for A, B in product(indices, repeat=2):
        (a, b), = A.pares
        (c, d), = B.pares
        uno = k_coefficient_1dof(1, a, b, c, d)
        multigrado = Fraction(0)
        for s in range(2):
            for e in _vectores_e(1, s, [a], [b], [c], [d]):
                multigrado += (-1) ** s * kcal_coefficient(1, s, e, [a], [b], [c], [d])
        if uno != multigrado:
            fallas.append((A, B))
    return fallas


# ============================================================================
# SERVICIO
# ============================================================================

class CorchetesService:
    """
    Corchetes de Poisson sobre un modelo de k pares canónicos.

    Uso:
        service = CorchetesService([("r", "p_r"), ("theta", "p_theta")])
        service.bracket_functions(simbolo("r"), hamiltoniano)
    """

    def __init__(
        self,
        pares: Sequence[Tuple[str, str]],
        normalizacion: Union[NormalizacionCorchete, str, None] = None,
    ):
        self.pares = tuple(tuple(p) for p in pares)
        self.normalizacion = NormalizacionCorchete(normalizacion or settings.NORMALIZACION_CORCHETE)
        self._posicion: Dict[str, Tuple[int, str]] = {}
        for i, (q, p) in enumerate(self.pares):
            self._posicion[q] = (i, "q")
            self._posicion[p] = (i, "p")

    @property
    def k(self) -> int:
        return len(self.pares)

    def bracket_moments(self, A: MomentIndex, B: MomentIndex) -> SymbolicExpression:
        return bracket_moments(A, B, self.normalizacion)

    def bracket_with_classical(self, v: str, B: Union[str, MomentIndex]) -> SymbolicExpression:
        """
        {v, B} con v variable canónica y B variable canónica o momento.

        {q_i, p_j} = δ_ij, {p_i, q_j} = −δ_ij, y cero con cualquier momento.
        """
        if v not in self._posicion:
            raise ValueError(f"{v!r} no es una variable canónica del modelo")
        if isinstance(B, MomentIndex):
            return SymbolicExpression.cero()
        if B not in self._posicion:
            raise ValueError(f"{B!r} no es una variable canónica del modelo")
        (i, tipo_v), (j, tipo_b) = self._posicion[v], self._posicion[B]
        if i != j or tipo_v == tipo_b:
            return SymbolicExpression.cero()
        return SymbolicExpression.constante(1 if tipo_v == "q" else -1)

    def bracket_functions(self, F: SymbolicExpression, H: SymbolicExpression) -> SymbolicExpression:
        """
        Extensión bilineal y antisimétrica a expresiones.

        Parte clásica por derivadas parciales en cada par (q, p) y parte
        cuántica por regla de la cadena sobre los factores de momento.
        """
        resultado = SymbolicExpression.cero()
        simbolos_f = set(F.simbolos_presentes())
        simbolos_h = set(H.simbolos_presentes())
        for q, p in self.pares:
            if q in simbolos_f and p in simbolos_h:
                resultado = resultado + F.derivar_simbolo(q) * H.derivar_simbolo(p)
            if p in simbolos_f and q in simbolos_h:
                resultado = resultado - F.derivar_simbolo(p) * H.derivar_simbolo(q)

        momentos_h = H.momentos_presentes()
        for alfa in F.momentos_presentes():
            d_f = F.derivar_momento(alfa)
            for beta in momentos_h:
                corchete = self.bracket_moments(alfa, beta)
                if corchete:
                    resultado = resultado + d_f * H.derivar_momento(beta) * corchete
        return resultado

    def jacobi_report(self, orden_maximo: int = 3, k: Optional[int] = None) -> ReporteJacobi:
        """
        Suma cíclica {{A,B},C} + {{B,C},A} + {{C,A},B} para ternas no ordenadas.

        Args:
            orden_maximo: Orden máximo de cada momento de la terna
            k: Grados de libertad de los momentos (por defecto los del modelo)

        Returns:
            ReporteJacobi con los residuos no nulos
        """
        k = k or self.k
        indices = enumerate_moments(k, orden_maximo)
        residuos = []
        total = 0
        for A, B, C in combinations_with_replacement(indices, 3):
            total += 1
            gA, gB, gC = (SymbolicExpression.momento(x) for x in (A, B, C))
            suma = (
                self.bracket_functions(self.bracket_moments(A, B), gC)
                + self.bracket_functions(self.bracket_moments(B, C), gA)
                + self.bracket_functions(self.bracket_moments(C, A), gB)
            )
            if suma:
                residuos.append(TripleJacobi(triple=[A.nombre, B.nombre, C.nombre], residuo=str(suma)))

        if residuos:
            logger.warning(f"⚠️ Jacobi: {len(residuos)}/{total} ternas con residuo ({self.normalizacion.value})")
        else:
            logger.info(f"✅ Jacobi exacto en {total} ternas ({self.normalizacion.value})")
        return ReporteJacobi(
            normalizacion=self.normalizacion.value,
            orden_maximo=orden_maximo,
            k=k,
            ternas_verificadas=total,
            residuos=residuos,
        )
