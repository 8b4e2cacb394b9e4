"""
Momentos centrales y estados del sistema

Define los multi-índices (a₁,b₁,…,a_k,b_k) que etiquetan a los momentos G,
su orden canónico (usado en vectores de estado y columnas CSV), el estado
numérico de una corrida y el predicado de la relación de incertidumbre.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement
from types import MappingProxyType
from typing import Dict, List, Mapping, Optional, Tuple

from app.excepciones import EstadoIncompletoError, TruncamientoInvalidoError


@dataclass(frozen=True)
class MomentIndex:
    """
    Multi-índice plano (a₁, b₁, …, a_k, b_k) de un momento central.

    Los órdenes 0 y 1 son las constantes 1 y 0; se permiten en el tipo
    para poder operar con ellos, pero nunca se almacenan en un estado.
    """
    indices: Tuple[int, ...]

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        if not indices or len(indices) % 2:
            raise ValueError(f"Multi-índice inválido: {self.indices}")
        if any(i < 0 for i in indices):
            raise ValueError(f"Índices negativos en {self.indices}")
        object.__setattr__(self, "indices", indices)

    @classmethod
    def de(cls, *indices: int) -> "MomentIndex":
        return cls(tuple(indices))

    @classmethod
    def desde_nombre(cls, nombre: str) -> "MomentIndex":
        """Interpreta nombres del tipo G_2_0_0_0"""
        partes = nombre.strip().split("_")
        if len(partes) < 3 or partes[0] != "G":
            raise ValueError(f"Nombre de momento inválido: {nombre!r}")
        try:
            return cls(tuple(int(p) for p in partes[1:]))
        except ValueError as e:
            raise ValueError(f"Nombre de momento inválido: {nombre!r}") from e

    @property
    def k(self) -> int:
        return len(self.indices) // 2

    @property
    def orden(self) -> int:
        return sum(self.indices)

    @property
    def pares(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(zip(self.indices[0::2], self.indices[1::2]))

    @property
    def nombre(self) -> str:
        return "G_" + "_".join(str(i) for i in self.indices)

    @property
    def es_diagonal(self) -> bool:
        """Un solo índice no nulo y par (p. ej. Δr² = G^{2,0,0,0})"""
        no_nulos = [i for i in self.indices if i]
        return len(no_nulos) == 1 and no_nulos[0] % 2 == 0

    def desplazar(self, posicion: int, delta: int) -> "MomentIndex":
        indices = list(self.indices)
        indices[posicion] += delta
        return MomentIndex(tuple(indices))

    def clave_orden(self) -> Tuple:
        """Orden graduado: primero por orden total, luego lexicográfico descendente"""
        return (self.orden, tuple(-i for i in self.indices))

    def __lt__(self, otro: "MomentIndex") -> bool:
        return self.clave_orden() < otro.clave_orden()

    def __repr__(self) -> str:
        return "G[" + ",".join(str(i) for i in self.indices) + "]"


@lru_cache(maxsize=None)
def _enumerar(k: int, N: int) -> Tuple[MomentIndex, ...]:
    indices = []
    ranuras = 2 * k
    for orden in range(2, N + 1):
        # estrellas y barras: cada combinación reparte 'orden' unidades en las ranuras
        for combinacion in combinations_with_replacement(range(ranuras), orden):
            cuenta = [0] * ranuras
            for ranura in combinacion:
                cuenta[ranura] += 1
            indices.append(MomentIndex(tuple(cuenta)))
    return tuple(sorted(indices, key=MomentIndex.clave_orden))


def enumerate_moments(k: int, N: int) -> List[MomentIndex]:
    """
    Enumera todos los multi-índices con 2 ≤ orden ≤ N en orden graduado.

    Args:
        k: Número de grados de libertad
        N: Orden de truncamiento

    Returns:
        Lista determinista de MomentIndex
    """
    if k < 1:
        raise ValueError("k debe ser ≥ 1")
    if N < 2:
        raise TruncamientoInvalidoError(f"El orden de truncamiento debe ser ≥ 2 (recibido {N})")
    return list(_enumerar(k, N))


@dataclass(frozen=True)
class SystemState:
    """
    Instantánea numérica: tiempo, valores esperados clásicos y momentos.

    Los momentos ausentes del mapa valen exactamente 0.
    """
    t: float
    clasicas: Mapping[str, float]
    momentos: Mapping[MomentIndex, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "clasicas", MappingProxyType(
            {nombre: float(v) for nombre, v in self.clasicas.items()}
        ))
        object.__setattr__(self, "momentos", MappingProxyType(
            {idx: float(v) for idx, v in self.momentos.items()}
        ))

    def momento(self, idx: MomentIndex) -> float:
        return self.momentos.get(idx, 0.0)

    @property
    def k(self) -> Optional[int]:
        """Grados de libertad según el ancho de los multi-índices (None sin momentos)"""
        anchos = {idx.k for idx in self.momentos}
        if len(anchos) > 1:
            raise ValueError(f"Momentos con distinto número de grados de libertad: {sorted(anchos)}")
        return anchos.pop() if anchos else None

    def valores(self) -> Dict[str, float]:
        """Mapa plano nombre → valor (variables clásicas y momentos por nombre)"""
        valores = dict(self.clasicas)
        valores.update({idx.nombre: v for idx, v in self.momentos.items()})
        return valores

    def validar(self, N: int) -> None:
        """Verifica órdenes 2..N y positividad de los momentos diagonales"""
        for idx, valor in self.momentos.items():
            if not 2 <= idx.orden <= N:
                raise ValueError(f"{idx.nombre} fuera del rango de órdenes 2..{N}")
            if idx.es_diagonal and valor < 0:
                raise ValueError(f"{idx.nombre} es una varianza y debe ser ≥ 0 (valor {valor})")


def indices_par(k: int, par: int) -> Tuple[MomentIndex, MomentIndex, MomentIndex]:
    """Devuelve (G^{2,0}, G^{1,1}, G^{0,2}) del par canónico 'par' en un sistema de k pares"""
    if not 0 <= par < k:
        raise ValueError(f"Par canónico {par} fuera de rango para k={k}")

    def _idx(a, b):
        indices = [0] * (2 * k)
        indices[2 * par] = a
        indices[2 * par + 1] = b
        return MomentIndex(tuple(indices))

    return _idx(2, 0), _idx(1, 1), _idx(0, 2)


def margen_incertidumbre(g_qq: float, g_qp: float, g_pp: float, hbar: float) -> float:
    """Lado izquierdo menos lado derecho de G^{2,0}G^{0,2} − (G^{1,1})² ≥ ħ²/4"""
    return g_qq * g_pp - g_qp * g_qp - hbar * hbar / 4.0


def uncertainty_ok(
    state: SystemState,
    par: int,
    hbar: float,
    k: Optional[int] = None,
    tolerancia: float = 0.0,
) -> Tuple[bool, float]:
    """
    Evalúa la relación de incertidumbre generalizada para un par canónico.

    Args:
        state: Estado con los tres momentos de segundo orden del par
        par: Índice del par (0 = (r, p_r), 1 = (θ, p_θ) en hidrógeno)
        hbar: Valor numérico de ħ
        k: Número de pares del modelo (por defecto, el del estado)
        tolerancia: Holgura relativa a ħ²/4 para estados saturados en flotante

    Returns:
        (cumple, margen) con margen = G^{2,0}G^{0,2} − (G^{1,1})² − ħ²/4
    """
    if k is None:
        k = state.k
        if k is None:
            raise EstadoIncompletoError(f"El estado no tiene momentos para el par {par}")
    requeridos = indices_par(k, par)
    faltantes = [idx.nombre for idx in requeridos if idx not in state.momentos]
    if faltantes:
        raise EstadoIncompletoError(f"Faltan momentos para el par {par}: {faltantes}")

    g_qq, g_qp, g_pp = (state.momentos[idx] for idx in requeridos)
    margen = margen_incertidumbre(g_qq, g_qp, g_pp, hbar)
    return margen >= -tolerancia * hbar * hbar / 4.0, margen
