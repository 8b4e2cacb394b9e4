"""
Gráficos SVG de trayectorias

Lee un CSV de trayectoria y emite un SVG por observable: r(t), p_r(t),
órbita en el plano, espacio de fase radial, energía, margen de
incertidumbre y razón Δr/Δp_r. Si hay un clasica.csv junto al archivo,
se superpone como referencia.
"""
from pathlib import Path
from typing import List, Optional, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
from loguru import logger  # noqa: E402

# SVG reproducible: ids sin aleatoriedad y sin fecha
plt.rcParams["svg.hashsalt"] = "momentos"
plt.rcParams["svg.fonttype"] = "none"

Ruta = Union[str, Path]


def _guardar(fig, ruta: Path) -> Path:
    fig.tight_layout()
    fig.savefig(ruta, format="svg", metadata={"Date": None})
    plt.close(fig)
    return ruta


def _serie(ruta: Path, datos: pd.DataFrame, clasica: Optional[pd.DataFrame], x: str, y: str,
           etiqueta_x: str, etiqueta_y: str, titulo: str) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(datos[x], datos[y], "b-", lw=1.2, label="efectiva")
    if clasica is not None and y in clasica:
        ax.plot(clasica[x], clasica[y], "k--", lw=1.0, label="clásica")
        ax.legend()
    ax.set_xlabel(etiqueta_x)
    ax.set_ylabel(etiqueta_y)
    ax.set_title(titulo)
    ax.grid(True, alpha=0.3)
    return _guardar(fig, ruta)


def _orbita(ruta: Path, datos: pd.DataFrame, clasica: Optional[pd.DataFrame]) -> Path:
    r, theta = datos["r"].to_numpy(), datos["theta"].to_numpy()
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.plot(r * np.cos(theta), r * np.sin(theta), "b-", lw=1.2, label="efectiva")
    if "G_2_0_0_0" in datos:
        with np.errstate(invalid="ignore"):
            delta = np.sqrt(datos["G_2_0_0_0"].to_numpy())
        for signo in (-1, 1):
            banda = r + signo * delta
            ax.plot(banda * np.cos(theta), banda * np.sin(theta), color="lightblue", lw=0.8)
    if clasica is not None:
        rc, tc = clasica["r"].to_numpy(), clasica["theta"].to_numpy()
        ax.plot(rc * np.cos(tc), rc * np.sin(tc), "k--", lw=1.0, label="clásica")
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x = r cos θ")
    ax.set_ylabel("y = r sin θ")
    ax.set_title("Órbita")
    ax.grid(True, alpha=0.3)
    ax.legend()
    return _guardar(fig, ruta)


def graficar_csv(
    ruta_csv: Ruta,
    directorio: Optional[Ruta] = None,
    ruta_clasica: Optional[Ruta] = None,
) -> List[Path]:
    """
    Emite los SVG de una trayectoria.

    Args:
        ruta_csv: CSV escrito por la corrida
        directorio: Destino (por defecto el directorio del CSV)
        ruta_clasica: CSV clásico a superponer (por defecto clasica.csv al lado)

    Returns:
        Rutas de los SVG emitidos
    """
    ruta_csv = Path(ruta_csv)
    if not ruta_csv.is_file():
        raise FileNotFoundError(f"No existe el CSV: {ruta_csv}")
    directorio = Path(directorio) if directorio is not None else ruta_csv.parent
    directorio.mkdir(parents=True, exist_ok=True)

    datos = pd.read_csv(ruta_csv)
    if ruta_clasica is None:
        candidata = ruta_csv.parent / "clasica.csv"
        ruta_clasica = candidata if candidata.is_file() and candidata != ruta_csv else None
    clasica = pd.read_csv(ruta_clasica) if ruta_clasica is not None else None

    emitidos = []
    if {"t", "r"} <= set(datos.columns):
        emitidos.append(_serie(directorio / "r_t.svg", datos, clasica, "t", "r", "t", "r", "Radio"))
    if {"t", "p_r"} <= set(datos.columns):
        emitidos.append(_serie(directorio / "p_r_t.svg", datos, clasica, "t", "p_r", "t", "p_r", "Momento radial"))
    if {"r", "theta"} <= set(datos.columns):
        emitidos.append(_orbita(directorio / "orbita.svg", datos, clasica))
    if {"r", "p_r"} <= set(datos.columns):
        emitidos.append(_serie(directorio / "fase.svg", datos, clasica, "r", "p_r", "r", "p_r", "Espacio de fase radial"))
    if "energia" in datos:
        emitidos.append(_serie(directorio / "energia.svg", datos, clasica, "t", "energia", "t", "H_Q", "Energía"))
    if "margen_r" in datos:
        emitidos.append(_serie(
            directorio / "incertidumbre.svg", datos, None, "t", "margen_r",
            "t", "G²⁰G⁰² − (G¹¹)² − ħ²/4", "Relación de incertidumbre (r, p_r)"
        ))
    if "razon_r" in datos:
        emitidos.append(_serie(directorio / "razon.svg", datos, None, "t", "razon_r", "t", "Δr/Δp_r", "Razón de dispersiones"))

    logger.info(f"✅ {len(emitidos)} gráficos SVG en {directorio}")
    return emitidos
