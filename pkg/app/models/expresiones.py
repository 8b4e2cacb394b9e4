"""
Expresiones simbólicas de coeficiente racional exacto

Polinomios en las variables clásicas (con potencias negativas de r y de
los parámetros), en símbolos de momento y en potencias de ħ. No es un
sistema de álgebra computacional: sólo se normaliza fusionando términos.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

from app.excepciones import EstadoIncompletoError
from app.models.momentos import MomentIndex

Numero = Union[int, Fraction]

# Clave de término: (potencia de ħ, potencias de símbolos, factores de momento, bandera imaginaria)
_Clave = Tuple[int, Tuple[Tuple[str, int], ...], Tuple[MomentIndex, ...], bool]


@dataclass(frozen=True)
class Termino:
    """Vista pública de un término normalizado"""
    coeficiente: Fraction
    hbar: int
    simbolos: Tuple[Tuple[str, int], ...]
    momentos: Tuple[MomentIndex, ...]
    imaginario: bool = False

    @property
    def orden_momentos(self) -> int:
        return sum(m.orden for m in self.momentos)

    def a_registro(self) -> list:
        """Tupla serializable (coeficiente, ħ, potencias clásicas, momentos, imaginario)"""
        return [
            str(self.coeficiente),
            self.hbar,
            {nombre: exp for nombre, exp in self.simbolos},
            [m.nombre for m in self.momentos],
            self.imaginario,
        ]

    def __str__(self) -> str:
        factores = []
        if self.imaginario:
            factores.append("i")
        if self.hbar:
            factores.append("hbar" if self.hbar == 1 else f"hbar^{self.hbar}")
        for nombre, exp in self.simbolos:
            factores.append(nombre if exp == 1 else f"{nombre}^{exp}")
        factores.extend(repr(m) for m in self.momentos)
        if not factores:
            return str(self.coeficiente)
        if self.coeficiente == 1:
            return "*".join(factores)
        if self.coeficiente == -1:
            return "-" + "*".join(factores)
        return str(self.coeficiente) + "*" + "*".join(factores)


def _ordenar_momentos(momentos: Iterable[MomentIndex]) -> Tuple[MomentIndex, ...]:
    return tuple(sorted(momentos, key=MomentIndex.clave_orden))


def _clave_termino(clave: _Clave):
    hbar, simbolos, momentos, imaginario = clave
    return (tuple(m.clave_orden() for m in momentos), hbar, imaginario, simbolos)


def _como_fraccion(valor) -> Fraction:
    if isinstance(valor, bool) or not isinstance(valor, (int, Fraction)):
        raise TypeError(f"Los coeficientes deben ser racionales exactos, no {type(valor).__name__}")
    return Fraction(valor)


class SymbolicExpression:
    """
    Suma normalizada de términos coef · ħ^h · Π símbolos^e · Π G.

    Inmutable. Dos términos nunca comparten firma y los coeficientes nulos
    se eliminan en la construcción.
    """

    __slots__ = ("_terminos", "_hash")

    def __init__(self, terminos: Optional[Mapping[_Clave, Fraction]] = None):
        limpios: Dict[_Clave, Fraction] = {}
        for clave, coef in (terminos or {}).items():
            if coef:
                limpios[clave] = limpios.get(clave, Fraction(0)) + coef
        self._terminos = {c: v for c, v in limpios.items() if v}
        self._hash = None

    # ------------------------------------------------------------------
    # Constructores
    # ------------------------------------------------------------------

    @classmethod
    def cero(cls) -> "SymbolicExpression":
        return cls()

    @classmethod
    def constante(cls, valor: Numero) -> "SymbolicExpression":
        return cls({(0, (), (), False): _como_fraccion(valor)})

    @classmethod
    def simbolo(cls, nombre: str, exponente: int = 1) -> "SymbolicExpression":
        simbolos = ((nombre, exponente),) if exponente else ()
        return cls({(0, simbolos, (), False): Fraction(1)})

    @classmethod
    def momento(cls, idx: MomentIndex) -> "SymbolicExpression":
        """G como expresión; los órdenes 0 y 1 se reemplazan por 1 y 0"""
        if idx.orden == 0:
            return cls.constante(1)
        if idx.orden == 1:
            return cls.cero()
        return cls({(0, (), (idx,), False): Fraction(1)})

    @classmethod
    def potencia_hbar(cls, potencia: int) -> "SymbolicExpression":
        if potencia < 0:
            raise ValueError("La potencia de ħ debe ser ≥ 0")
        return cls({(potencia, (), (), False): Fraction(1)})

    @classmethod
    def i_hbar(cls) -> "SymbolicExpression":
        """iħ marcado como imaginario (sólo para transcripciones impresas)"""
        return cls({(1, (), (), True): Fraction(1)})

    @classmethod
    def desde_terminos(cls, terminos: Iterable[Termino]) -> "SymbolicExpression":
        datos: Dict[_Clave, Fraction] = {}
        for t in terminos:
            clave = (t.hbar, tuple(sorted(t.simbolos)), _ordenar_momentos(t.momentos), t.imaginario)
            datos[clave] = datos.get(clave, Fraction(0)) + t.coeficiente
        return cls(datos)

    @classmethod
    def desde_registro(cls, registros: Iterable[list]) -> "SymbolicExpression":
        terminos = []
        for coef, hbar, simbolos, momentos, imaginario in registros:
            terminos.append(Termino(
                coeficiente=Fraction(coef),
                hbar=int(hbar),
                simbolos=tuple(sorted((n, int(e)) for n, e in simbolos.items())),
                momentos=tuple(MomentIndex.desde_nombre(m) for m in momentos),
                imaginario=bool(imaginario),
            ))
        return cls.desde_terminos(terminos)

    # ------------------------------------------------------------------
    # Acceso
    # ------------------------------------------------------------------

    @property
    def terminos(self) -> List[Termino]:
        return [
            Termino(coef, clave[0], clave[1], clave[2], clave[3])
            for clave, coef in sorted(self._terminos.items(), key=lambda kv: _clave_termino(kv[0]))
        ]

    def es_cero(self) -> bool:
        return not self._terminos

    def __len__(self) -> int:
        return len(self._terminos)

    def __bool__(self) -> bool:
        return bool(self._terminos)

    def momentos_presentes(self) -> List[MomentIndex]:
        presentes = {m for clave in self._terminos for m in clave[2]}
        return sorted(presentes, key=MomentIndex.clave_orden)

    def simbolos_presentes(self) -> List[str]:
        return sorted({nombre for clave in self._terminos for nombre, _ in clave[1]})

    def orden_maximo_momento(self) -> int:
        return max((m.orden for clave in self._terminos for m in clave[2]), default=0)

    def tiene_imaginarios(self) -> bool:
        return any(clave[3] for clave in self._terminos)

    def parte_real(self) -> "SymbolicExpression":
        return SymbolicExpression({c: v for c, v in self._terminos.items() if not c[3]})

    def parte_imaginaria(self) -> "SymbolicExpression":
        return SymbolicExpression({c: v for c, v in self._terminos.items() if c[3]})

    # ------------------------------------------------------------------
    # Aritmética
    # ------------------------------------------------------------------

    @staticmethod
    def _como_expresion(otro) -> "SymbolicExpression":
        if isinstance(otro, SymbolicExpression):
            return otro
        return SymbolicExpression.constante(otro)

    def __add__(self, otro) -> "SymbolicExpression":
        otro = self._como_expresion(otro)
        datos = dict(self._terminos)
        for clave, coef in otro._terminos.items():
            datos[clave] = datos.get(clave, Fraction(0)) + coef
        return SymbolicExpression(datos)

    __radd__ = __add__

    def __neg__(self) -> "SymbolicExpression":
        return SymbolicExpression({c: -v for c, v in self._terminos.items()})

    def __sub__(self, otro) -> "SymbolicExpression":
        return self + (-self._como_expresion(otro))

    def __rsub__(self, otro) -> "SymbolicExpression":
        return self._como_expresion(otro) - self

    def __mul__(self, otro) -> "SymbolicExpression":
        if not isinstance(otro, SymbolicExpression):
            factor = _como_fraccion(otro)
            return SymbolicExpression({c: v * factor for c, v in self._terminos.items()})

        datos: Dict[_Clave, Fraction] = {}
        for (h1, s1, m1, i1), c1 in self._terminos.items():
            for (h2, s2, m2, i2), c2 in otro._terminos.items():
                potencias = dict(s1)
                for nombre, exp in s2:
                    potencias[nombre] = potencias.get(nombre, 0) + exp
                simbolos = tuple(sorted((n, e) for n, e in potencias.items() if e))
                coef = c1 * c2
                if i1 and i2:
                    # i·i = −1
                    coef = -coef
                clave = (h1 + h2, simbolos, _ordenar_momentos(m1 + m2), i1 != i2)
                datos[clave] = datos.get(clave, Fraction(0)) + coef
        return SymbolicExpression(datos)

    __rmul__ = __mul__

    def _inversa_monomio(self) -> "SymbolicExpression":
        if len(self._terminos) != 1:
            raise ZeroDivisionError("Sólo se puede dividir por monomios")
        (hbar, simbolos, momentos, imaginario), coef = next(iter(self._terminos.items()))
        if hbar or momentos or imaginario:
            raise ZeroDivisionError("No se divide por ħ, por momentos ni por términos imaginarios")
        inversos = tuple((n, -e) for n, e in simbolos)
        return SymbolicExpression({(0, inversos, (), False): 1 / coef})

    def __truediv__(self, otro) -> "SymbolicExpression":
        if isinstance(otro, SymbolicExpression):
            return self * otro._inversa_monomio()
        return self * (1 / _como_fraccion(otro))

    def __rtruediv__(self, otro) -> "SymbolicExpression":
        return self._como_expresion(otro) * self._inversa_monomio()

    def __pow__(self, exponente: int) -> "SymbolicExpression":
        if not isinstance(exponente, int):
            raise TypeError("Sólo exponentes enteros")
        if exponente < 0:
            return self._inversa_monomio() ** (-exponente)
        resultado = SymbolicExpression.constante(1)
        for _ in range(exponente):
            resultado = resultado * self
        return resultado

    # ------------------------------------------------------------------
    # Comparación y texto
    # ------------------------------------------------------------------

    def __eq__(self, otro) -> bool:
        if isinstance(otro, (int, Fraction)) and not isinstance(otro, bool):
            otro = SymbolicExpression.constante(otro)
        if not isinstance(otro, SymbolicExpression):
            return NotImplemented
        return self._terminos == otro._terminos

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terminos.items()))
        return self._hash

    def __str__(self) -> str:
        if not self._terminos:
            return "0"
        return " + ".join(str(t) for t in self.terminos)

    def __repr__(self) -> str:
        return f"SymbolicExpression({self})"

    def a_registro(self) -> List[list]:
        return [t.a_registro() for t in self.terminos]

    # ------------------------------------------------------------------
    # Derivadas, truncamiento y restricciones
    # ------------------------------------------------------------------

    def derivar_simbolo(self, nombre: str) -> "SymbolicExpression":
        datos: Dict[_Clave, Fraction] = {}
        for (hbar, simbolos, momentos, imaginario), coef in self._terminos.items():
            potencias = dict(simbolos)
            exp = potencias.get(nombre, 0)
            if not exp:
                continue
            potencias[nombre] = exp - 1
            nuevos = tuple(sorted((n, e) for n, e in potencias.items() if e))
            clave = (hbar, nuevos, momentos, imaginario)
            datos[clave] = datos.get(clave, Fraction(0)) + coef * exp
        return SymbolicExpression(datos)

    def derivar_momento(self, idx: MomentIndex) -> "SymbolicExpression":
        datos: Dict[_Clave, Fraction] = {}
        for (hbar, simbolos, momentos, imaginario), coef in self._terminos.items():
            multiplicidad = momentos.count(idx)
            if not multiplicidad:
                continue
            restantes = list(momentos)
            restantes.remove(idx)
            clave = (hbar, simbolos, tuple(restantes), imaginario)
            datos[clave] = datos.get(clave, Fraction(0)) + coef * multiplicidad
        return SymbolicExpression(datos)

    def truncar(self, N: int) -> "SymbolicExpression":
        """Descarta todo término con algún factor de momento de orden > N"""
        return SymbolicExpression({
            c: v for c, v in self._terminos.items()
            if all(m.orden <= N for m in c[2])
        })

    def sin_momentos(self) -> "SymbolicExpression":
        """Límite clásico: todos los momentos a cero"""
        return SymbolicExpression({c: v for c, v in self._terminos.items() if not c[2]})

    def anular(self, simbolos: Iterable[str] = (), momentos: Iterable[MomentIndex] = ()) -> "SymbolicExpression":
        """Sustituye por cero los símbolos y momentos indicados"""
        simbolos = set(simbolos)
        momentos = set(momentos)
        datos = {}
        for clave, coef in self._terminos.items():
            potencias = dict(clave[1])
            if any(potencias.get(s, 0) < 0 for s in simbolos):
                raise ZeroDivisionError(f"Se anula un símbolo con potencia negativa en {Termino(coef, *clave)}")
            if any(potencias.get(s, 0) > 0 for s in simbolos):
                continue
            if any(m in momentos for m in clave[2]):
                continue
            datos[clave] = coef
        return SymbolicExpression(datos)

    def sustituir_simbolo(self, nombre: str, valor: "SymbolicExpression") -> "SymbolicExpression":
        """Reemplaza un símbolo (con potencias ≥ 0) por otra expresión"""
        resultado = SymbolicExpression.cero()
        for (hbar, simbolos, momentos, imaginario), coef in self._terminos.items():
            potencias = dict(simbolos)
            exp = potencias.pop(nombre, 0)
            if exp < 0:
                raise ValueError(f"No se sustituye {nombre} con potencia negativa")
            resto = SymbolicExpression({
                (hbar, tuple(sorted(potencias.items())), momentos, imaginario): coef
            })
            resultado = resultado + resto * (valor ** exp)
        return resultado

    # ------------------------------------------------------------------
    # Evaluación numérica
    # ------------------------------------------------------------------

    def evaluar(
        self,
        valores: Mapping[str, float],
        hbar: float,
        excluir_imaginarios: bool = True,
    ) -> float:
        """
        Sustituye valores flotantes en la expresión.

        Args:
            valores: nombre → valor para símbolos y momentos (por nombre G_a_b_…)
            hbar: Valor numérico de ħ
            excluir_imaginarios: Omite términos marcados como imaginarios

        Returns:
            Valor real de la expresión
        """
        total = 0.0
        for termino in self.terminos:
            if termino.imaginario:
                if excluir_imaginarios:
                    continue
                raise ValueError("Término imaginario en evaluación real")
            valor = float(termino.coeficiente) * hbar ** termino.hbar
            for nombre, exp in termino.simbolos:
                if nombre not in valores:
                    raise EstadoIncompletoError(f"Falta el símbolo {nombre!r}")
                valor *= valores[nombre] ** exp
            for m in termino.momentos:
                if m.nombre not in valores:
                    raise EstadoIncompletoError(f"Falta el momento {m.nombre}")
                valor *= valores[m.nombre]
            total += valor
        return total


# ============================================================================
# ATAJOS
# ============================================================================

def G(*indices: int) -> SymbolicExpression:
    """Momento G^{a₁,b₁,…} como expresión"""
    return SymbolicExpression.momento(MomentIndex(tuple(indices)))


def simbolo(nombre: str) -> SymbolicExpression:
    return SymbolicExpression.simbolo(nombre)


def constante(valor: Numero) -> SymbolicExpression:
    return SymbolicExpression.constante(valor)
