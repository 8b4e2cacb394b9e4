"""
Utilidades de escritura de resultados

CSV con formato fijo de 17 cifras significativas (independiente del
locale), manifiestos JSON y sumas de verificación sha256.
"""
import hashlib
import json
from pathlib import Path
from typing import Dict, Iterable, Optional, Union

import pandas as pd
from pydantic import BaseModel

FORMATO_FLOTANTE = "%.17g"

Ruta = Union[str, Path]


def preparar_directorio(directorio: Ruta) -> Path:
    directorio = Path(directorio)
    directorio.mkdir(parents=True, exist_ok=True)
    return directorio


def escribir_csv(datos: pd.DataFrame, ruta: Ruta) -> Path:
    """
    Escribe un DataFrame sin índice, con '\\n' como fin de línea.

    Args:
        datos: Tabla a escribir
        ruta: Archivo destino

    Returns:
        Ruta escrita
    """
    ruta = Path(ruta)
    ruta.parent.mkdir(parents=True, exist_ok=True)
    datos.to_csv(ruta, index=False, float_format=FORMATO_FLOTANTE, lineterminator="\n")
    return ruta


def escribir_texto(texto: str, ruta: Ruta) -> Path:
    ruta = Path(ruta)
    ruta.parent.mkdir(parents=True, exist_ok=True)
    with open(ruta, "w", encoding="utf-8", newline="\n") as f:
        f.write(texto)
    return ruta


def escribir_json(datos: Union[BaseModel, Dict], ruta: Ruta) -> Path:
    if isinstance(datos, BaseModel):
        datos = datos.model_dump(mode="json")
    return escribir_texto(json.dumps(datos, ensure_ascii=False, indent=2, sort_keys=True) + "\n", ruta)


def sha256_archivo(ruta: Ruta) -> str:
    digest = hashlib.sha256()
    with open(ruta, "rb") as f:
        for bloque in iter(lambda: f.read(1 << 16), b""):
            digest.update(bloque)
    return digest.hexdigest()


def sumas_verificacion(rutas: Iterable[Ruta], base: Optional[Ruta] = None) -> Dict[str, str]:
    """nombre relativo → sha256 de cada archivo emitido"""
    sumas = {}
    for ruta in rutas:
        ruta = Path(ruta)
        nombre = ruta.relative_to(base).as_posix() if base is not None else ruta.name
        sumas[nombre] = sha256_archivo(ruta)
    return dict(sorted(sumas.items()))
