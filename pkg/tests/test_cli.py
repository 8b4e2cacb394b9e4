"""
Tests de la interfaz de línea de comandos
"""
import json

from app.main import ERROR_USO, EXITO, construir_parser, main
from app.services.ecuaciones_service import leer_sistema


def test_derive(tmp_path):
    assert main(["derive", "--order", "2", "--out", str(tmp_path)]) == EXITO
    texto = (tmp_path / "ecuaciones_hidrogeno_N2.txt").read_text(encoding="utf-8")
    assert "ecuaciones vivas: 12" in texto
    sistema = leer_sistema(tmp_path / "ecuaciones_hidrogeno_N2.jsonl")
    assert sistema.ecuaciones_vivas == 12


def test_derive_modelo_desconocido(tmp_path):
    assert main(["derive", "--model", "helio", "--out", str(tmp_path)]) == ERROR_USO


def test_subcomando_invalido():
    assert main(["simular"]) == ERROR_USO


def test_integrate_sin_escenario():
    assert main(["integrate"]) == ERROR_USO


def test_escenario_inexistente(tmp_path):
    assert main(["integrate", "--scenario", str(tmp_path / "no_existe.env")]) == ERROR_USO


def test_escenario_malformado(tmp_path):
    ruta = tmp_path / "malo.env"
    ruta.write_text("NOMBRE=x\nR0=-1\nT_FIN=1\n")
    assert main(["integrate", "--scenario", str(ruta), "--out", str(tmp_path / "salida")]) == ERROR_USO


def test_integrate_y_plot(escenarios, tmp_path):
    salida = tmp_path / "l0"
    codigo = main([
        "integrate", "--scenario", str(escenarios / "l0.env"), "--t-end", "0.5", "--out", str(salida),
    ])
    assert codigo == EXITO
    manifiesto = json.loads((salida / "manifiesto.json").read_text(encoding="utf-8"))
    assert manifiesto["configuracion"]["T_FIN"] == 0.5
    assert manifiesto["motivo_fin"] == "t_fin"

    assert main(["plot", "--csv", str(salida / "trayectoria.csv")]) == EXITO
    for nombre in ("r_t", "p_r_t", "orbita", "fase", "energia", "incertidumbre", "razon"):
        assert (salida / f"{nombre}.svg").is_file()


def test_integrate_divergencia_no_es_error(escenarios, tmp_path):
    ruta = tmp_path / "acotado.env"
    ruta.write_text((escenarios / "l0.env").read_text(encoding="utf-8") + "COTA_MOMENTOS=0.001\n", encoding="utf-8")
    salida = tmp_path / "acotado"
    assert main(["integrate", "--scenario", str(ruta), "--out", str(salida)]) == EXITO
    manifiesto = json.loads((salida / "manifiesto.json").read_text(encoding="utf-8"))
    assert manifiesto["motivo_fin"] == "divergencia"
    assert manifiesto["configuracion"]["COTA_MOMENTOS"] == 0.001


def test_integrate_desde_manifiesto(escenarios, tmp_path):
    primera = tmp_path / "primera"
    assert main(["integrate", "--scenario", str(escenarios / "l0.env"), "--t-end", "0.2", "--out", str(primera)]) == EXITO
    segunda = tmp_path / "segunda"
    assert main(["integrate", "--scenario", str(primera / "manifiesto.json"), "--out", str(segunda)]) == EXITO
    assert (primera / "trayectoria.csv").read_bytes() == (segunda / "trayectoria.csv").read_bytes()


def test_plot_sin_csv(tmp_path):
    assert main(["plot", "--csv", str(tmp_path / "nada.csv")]) == ERROR_USO


def test_parser_opciones_comunes():
    args = construir_parser().parse_args(["sweep", "--scenario", "x.env", "--workers", "2", "--ladder", "1e-3,1e-4"])
    assert args.comando == "sweep"
    assert args.workers == 2
    assert args.ladder == "1e-3,1e-4"
