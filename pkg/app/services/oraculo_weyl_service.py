"""
Oráculo de Weyl para el motor de corchetes

Verificación independiente por álgebra de operadores no conmutativos:
productos simetrizados de Weyl de los operadores centrados (x̂−x), (p̂−p),
conmutadores canónicos [X_i, P_j] = iħδ_ij y re-expansión de los valores
esperados en momentos centrales.

Los coeficientes se guardan como potencias de (iħ) con coeficiente
racional: la unidad imaginaria sólo aparece acompañando a ħ, así que la
paridad de la potencia decide si el término es real.
"""
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import factorial
from typing import Dict, List, Optional, Tuple

from loguru import logger

from app.config import settings
from app.excepciones import CapacidadOraculoError, TerminoImaginarioError
from app.models.expresiones import SymbolicExpression
from app.models.momentos import MomentIndex, enumerate_moments
from app.schemas.schemas_reportes import ParVerificado, ReporteOraculo
from app.services.corchetes_service import NormalizacionCorchete, binomial, bracket_moments

# Palabra canónica: exponentes planos (a₁, b₁, …) con X_i antes que P_i
_Palabra = Tuple[int, ...]
# Clave de término: (palabra, potencia de iħ)
_ClaveNC = Tuple[_Palabra, int]


def _producto_un_grado(x: Tuple[int, int], y: Tuple[int, int]) -> List[Tuple[Tuple[int, int], int, int]]:
    """
    (X^a P^b)(X^c P^d) en orden normal.

    P^b X^c = Σ_j (−iħ)^j j! C(b,j) C(c,j) X^{c−j} P^{b−j}
    """
    a, b = x
    c, d = y
    salida = []
    for j in range(min(b, c) + 1):
        coef = (-1) ** j * factorial(j) * binomial(b, j) * binomial(c, j)
        salida.append(((a + c - j, b + d - j), j, coef))
    return salida


class NcPolynomial:
    """Polinomio en X_i, P_i reducido a orden canónico"""

    __slots__ = ("terminos", "k")

    def __init__(self, k: int, terminos: Optional[Dict[_ClaveNC, Fraction]] = None):
        self.k = k
        self.terminos = {c: v for c, v in (terminos or {}).items() if v}

    @classmethod
    def uno(cls, k: int) -> "NcPolynomial":
        return cls(k, {((0,) * (2 * k), 0): Fraction(1)})

    @classmethod
    def letra(cls, k: int, grado: int, tipo: str) -> "NcPolynomial":
        palabra = [0] * (2 * k)
        palabra[2 * grado + (0 if tipo == "X" else 1)] = 1
        return cls(k, {(tuple(palabra), 0): Fraction(1)})

    def __add__(self, otro: "NcPolynomial") -> "NcPolynomial":
        datos = dict(self.terminos)
        for clave, coef in otro.terminos.items():
            datos[clave] = datos.get(clave, Fraction(0)) + coef
        return NcPolynomial(self.k, datos)

    def __sub__(self, otro: "NcPolynomial") -> "NcPolynomial":
        return self + otro.escalar(-1)

    def escalar(self, factor) -> "NcPolynomial":
        return NcPolynomial(self.k, {c: v * factor for c, v in self.terminos.items()})

    def __mul__(self, otro: "NcPolynomial") -> "NcPolynomial":
        datos: Dict[_ClaveNC, Fraction] = {}
        for (w1, q1), c1 in self.terminos.items():
            for (w2, q2), c2 in otro.terminos.items():
                expansiones = [
                    _producto_un_grado((w1[2 * i], w1[2 * i + 1]), (w2[2 * i], w2[2 * i + 1]))
                    for i in range(self.k)
                ]
                for combinacion in product(*expansiones):
                    palabra = []
                    q = q1 + q2
                    coef = c1 * c2
                    for par, j, factor in combinacion:
                        palabra.extend(par)
                        q += j
                        coef *= factor
                    clave = (tuple(palabra), q)
                    datos[clave] = datos.get(clave, Fraction(0)) + coef
        return NcPolynomial(self.k, datos)

    def conmutador(self, otro: "NcPolynomial") -> "NcPolynomial":
        return self * otro - otro * self

    def __eq__(self, otro) -> bool:
        return isinstance(otro, NcPolynomial) and self.k == otro.k and self.terminos == otro.terminos

    def __repr__(self) -> str:
        if not self.terminos:
            return "0"
        partes = []
        for (palabra, q), coef in sorted(self.terminos.items()):
            factores = [f"(i*hbar)^{q}"] if q else []
            for i in range(self.k):
                for letra, exp in (("X", palabra[2 * i]), ("P", palabra[2 * i + 1])):
                    if exp:
                        nombre = f"{letra}{i + 1}" if self.k > 1 else letra
                        factores.append(nombre if exp == 1 else f"{nombre}^{exp}")
            partes.append(f"{coef}*" + "*".join(factores) if factores else str(coef))
        return " + ".join(partes)


@lru_cache(maxsize=None)
def _simetrizar_un_grado(a: int, b: int) -> Tuple[Tuple[_ClaveNC, Fraction], ...]:
    """Promedio de los C(a+b, a) ordenamientos distintos de X^a P^b"""
    total = NcPolynomial(1)
    arreglos = list(combinations(range(a + b), a))
    for posiciones_x in arreglos:
        palabra = NcPolynomial.uno(1)
        for posicion in range(a + b):
            tipo = "X" if posicion in posiciones_x else "P"
            palabra = palabra * NcPolynomial.letra(1, 0, tipo)
        total = total + palabra
    return tuple(total.escalar(Fraction(1, len(arreglos))).terminos.items())


def _embeber(k: int, grado: int, terminos) -> NcPolynomial:
    datos = {}
    for (palabra, q), coef in terminos:
        completa = [0] * (2 * k)
        completa[2 * grado], completa[2 * grado + 1] = palabra
        datos[(tuple(completa), q)] = coef
    return NcPolynomial(k, datos)


def _esperanza(poli: NcPolynomial) -> Dict[int, SymbolicExpression]:
    """
    Valor esperado de un polinomio canónico en términos de momentos de Weyl.

    ⟨ξ^a π^b⟩ = Σ_j (iħ/2)^j j! C(a,j) C(b,j) G^{a−j, b−j}, factorizado por grado.

    Returns:
        potencia de iħ → expresión real que la multiplica
    """
    salida: Dict[int, SymbolicExpression] = {}
    for (palabra, q), coef in poli.terminos.items():
        opciones = []
        for i in range(poli.k):
            a, b = palabra[2 * i], palabra[2 * i + 1]
            opciones.append([
                (j, Fraction(factorial(j) * binomial(a, j) * binomial(b, j), 2 ** j))
                for j in range(min(a, b) + 1)
            ])
        for combinacion in product(*opciones):
            indices = []
            potencia = q
            factor = coef
            for i, (j, peso) in enumerate(combinacion):
                indices.extend((palabra[2 * i] - j, palabra[2 * i + 1] - j))
                potencia += j
                factor *= peso
            termino = SymbolicExpression.momento(MomentIndex(tuple(indices))) * factor
            if termino:
                salida[potencia] = salida.get(potencia, SymbolicExpression.cero()) + termino
    return salida


class OraculoWeylService:
    """
    Corchete entre momentos por álgebra de operadores.

    Uso:
        oraculo = OraculoWeylService()
        oraculo.oracle_bracket(MomentIndex((2, 0)), MomentIndex((0, 2)))
    """

    def __init__(self, cap: Optional[int] = None):
        self.cap = cap if cap is not None else settings.ORACULO_CAP
        self._sigma: Optional[int] = None

    def _verificar_cap(self, idx: MomentIndex) -> None:
        if idx.orden > self.cap:
            raise CapacidadOraculoError(f"{idx.nombre} excede el tope del oráculo ({self.cap})")

    def weyl_symmetrize(self, idx: MomentIndex) -> NcPolynomial:
        """Producto completamente simetrizado de los operadores centrados"""
        self._verificar_cap(idx)
        resultado = NcPolynomial.uno(idx.k)
        for grado, (a, b) in enumerate(idx.pares):
            resultado = resultado * _embeber(idx.k, grado, _simetrizar_un_grado(a, b))
        return resultado

    def _gradiente(self, idx: MomentIndex) -> List[Tuple[SymbolicExpression, NcPolynomial]]:
        """
        Operador gradiente de G como función del estado.

        g = W(ξ^a π^b) − Σ_i (a_i G^{…a_i−1…} X_i + b_i G^{…b_i−1…} P_i)
        """
        piezas = [(SymbolicExpression.constante(1), self.weyl_symmetrize(idx))]
        for grado, (a, b) in enumerate(idx.pares):
            if a:
                coef = SymbolicExpression.momento(idx.desplazar(2 * grado, -1)) * (-a)
                if coef:
                    piezas.append((coef, NcPolynomial.letra(idx.k, grado, "X")))
            if b:
                coef = SymbolicExpression.momento(idx.desplazar(2 * grado + 1, -1)) * (-b)
                if coef:
                    piezas.append((coef, NcPolynomial.letra(idx.k, grado, "P")))
        return piezas

    def _corchete_crudo(self, A: MomentIndex, B: MomentIndex) -> SymbolicExpression:
        """⟨[g_A, g_B]⟩/(iħ) sin convención de signo"""
        if A.k != B.k:
            raise ValueError(f"{A} y {B} no comparten el número de grados de libertad")
        acumulado: Dict[int, SymbolicExpression] = {}
        for coef_a, op_a in self._gradiente(A):
            for coef_b, op_b in self._gradiente(B):
                conmutador = op_a.conmutador(op_b)
                if not conmutador.terminos:
                    continue
                for potencia, expr in _esperanza(conmutador).items():
                    acumulado[potencia] = acumulado.get(potencia, SymbolicExpression.cero()) + coef_a * coef_b * expr

        resultado = SymbolicExpression.cero()
        for potencia, expr in acumulado.items():
            if not expr:
                continue
            # division por iħ
            restante = potencia - 1
            if restante < 0 or restante % 2:
                raise TerminoImaginarioError(
                    f"Término imaginario sobrevive en {{{A.nombre}, {B.nombre}}}: (iħ)^{restante}·({expr})"
                )
            signo = -1 if (restante // 2) % 2 else 1
            resultado = resultado + expr * SymbolicExpression.potencia_hbar(restante) * signo
        return resultado

    @property
    def sigma(self) -> int:
        """Convención de signo global, ajustada una única vez con {G^{2,0}, G^{0,2}}"""
        if self._sigma is None:
            A, B = MomentIndex((2, 0)), MomentIndex((0, 2))
            crudo = self._corchete_crudo(A, B)
            objetivo = bracket_moments(A, B)
            if crudo == objetivo:
                self._sigma = 1
            elif crudo == -objetivo:
                self._sigma = -1
            else:
                raise TerminoImaginarioError(f"No se puede ajustar sigma: oráculo {crudo}, motor {objetivo}")
            logger.info(f"📌 Convención de signo del oráculo: sigma = {self._sigma:+d}")
        return self._sigma

    def fit_sign_convention(self) -> int:
        return self.sigma

    def oracle_bracket(self, A: MomentIndex, B: MomentIndex) -> SymbolicExpression:
        """
        {G^A, G^B} como ⟨[Â, B̂]⟩/(iħσ) con términos de regla de la cadena.

        Raises:
            CapacidadOraculoError: algún orden supera el tope
            TerminoImaginarioError: sobrevive una parte imaginaria
        """
        self._verificar_cap(A)
        self._verificar_cap(B)
        return self._corchete_crudo(A, B) * self.sigma

    def oracle_report(
        self,
        normalizacion: NormalizacionCorchete = NormalizacionCorchete.MOYAL,
        max_un_grado: int = 4,
        max_dos_grados: int = 3,
    ) -> ReporteOraculo:
        """
        Compara oráculo y motor en todos los pares ordenados de momentos.

        Args:
            normalizacion: Normalización del motor a verificar
            max_un_grado: Orden máximo para k = 1
            max_dos_grados: Orden máximo para k = 2

        Returns:
            ReporteOraculo con cada par y su estado
        """
        pares = []
        for k, orden in ((1, max_un_grado), (2, max_dos_grados)):
            indices = enumerate_moments(k, orden)
            for A, B in product(indices, repeat=2):
                motor = bracket_moments(A, B, normalizacion)
                oraculo = self.oracle_bracket(A, B)
                coincide = motor == oraculo
                pares.append(ParVerificado(
                    a=A.nombre,
                    b=B.nombre,
                    coincide=coincide,
                    motor="" if coincide else str(motor),
                    oraculo="" if coincide else str(oraculo),
                ))

        reporte = ReporteOraculo(normalizacion=normalizacion.value, sigma=self.sigma, pares=pares)
        if reporte.exitoso:
            logger.info(f"✅ Oráculo: {len(pares)} pares coinciden ({normalizacion.value})")
        else:
            logger.warning(
                f"⚠️ Oráculo: {len(reporte.discrepancias)}/{len(pares)} pares difieren ({normalizacion.value})"
            )
        return reporte


_oraculo_global: Optional[OraculoWeylService] = None


def get_oraculo_service() -> OraculoWeylService:
    """Obtiene la instancia global del oráculo (sigma queda congelado en ella)"""
    global _oraculo_global
    if _oraculo_global is None:
        _oraculo_global = OraculoWeylService()
    return _oraculo_global
