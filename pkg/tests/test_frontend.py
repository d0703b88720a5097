import hashlib

import numpy as np
import pytest
from PIL import Image

from rhexplore.cli import main, read_config
from rhexplore.errors import DomainError
from rhexplore.lfunctions import ZetaFunction
from rhexplore.plotting import PlotSpec, domain_color, render, render_array, save_image, xray
from rhexplore.zeros import ScanConfig, scan_zeros


def test_constant_function_uniform(tmp_path):
    f = lambda z: np.ones_like(np.asarray(z, dtype=complex))
    for mode in ("domain_color", "xray", "log_abs"):
        img = render_array(f, PlotSpec((0j, 1 + 1j), 20, 20, mode))
        assert (img == img[0, 0]).all()


def test_spec_validation():
    with pytest.raises(DomainError):
        PlotSpec((0j, 1 + 1j), 8, 20)
    with pytest.raises(DomainError):
        PlotSpec((1 + 1j, 0j), 20, 20)


def test_domain_color_lightness():
    F = np.array([[0.0, 1.0, 1e6]], dtype=complex)
    img = domain_color(F).astype(int)
    assert img[0, 0].sum() == 0 and img[0, 2].min() > 240


def test_xray_crossings_near_zeros():
    spec = PlotSpec((complex(-2, 0), complex(4, 60)), 121, 601, "xray")
    img = render_array(ZetaFunction(), spec)
    zs = scan_zeros(ZetaFunction(), ScanConfig((0, 1), (10, 60)))
    H, W = img.shape[:2]
    for z in zs:
        i = int(round((60 - z.im) / 60 * (H - 1)))
        j = int(round((z.re + 2) / 6 * (W - 1)))
        win = img[max(i - 1, 0):i + 2, max(j - 1, 0):j + 2].reshape(-1, 3)
        red = ((win == (255, 0, 0)).all(axis=1)).any()
        cyan = ((win == (0, 200, 255)).all(axis=1)).any()
        assert red and cyan


def test_png_and_ppm(tmp_path):
    img = xray(np.ones((16, 16), dtype=complex))
    p = save_image(img, tmp_path / "a.png")
    assert Image.open(p).size == (16, 16)
    q = save_image(img, tmp_path / "a.ppm")
    assert q.read_bytes().startswith(b"P6 16 16 255\n")


def test_render_overlay(tmp_path):
    spec = PlotSpec((complex(0, 10), complex(1, 30)), 40, 80, "log_abs", overlay_zeros=True)
    render(ZetaFunction(), spec, tmp_path / "o.png")
    assert len(spec.zeros) == 3


def test_cli_eval(capsys):
    assert main(["eval", "--function", "zeta", "--z", "2,0"]) == 0
    assert capsys.readouterr().out.startswith("1.644934")


def test_cli_empty_window(capsys):
    assert main(["zeros", "--function", "zeta", "--window", "2,3,10,50"]) == 0
    assert capsys.readouterr().out.strip() == "re,im,residual,class,terms"


def test_cli_mertens(capsys):
    assert main(["equiv", "--check", "mertens", "--x", "1000000"]) == 0
    assert "no violations" in capsys.readouterr().out


def test_cli_usage_errors(capsys):
    assert main(["nonsense"]) == 1
    assert main(["eval", "--bogus"]) == 1
    assert main(["eval", "--function", "nosuch", "--z", "1,1"]) == 1
    assert "usage" in capsys.readouterr().err


def test_cli_numeric_failure(capsys):
    assert main(["eval", "--function", "zeta", "--z", "1,0"]) == 2


def test_cli_ec_and_modular(capsys):
    assert main(["ec", "--curve", "0 0 1 -7 6", "--op", "coeffs"]) == 0
    assert capsys.readouterr().out.split()[:5] == ["1", "-2", "-3", "2", "-4"]
    assert main(["modular", "--level", "43", "--op", "hecke", "--p", "2"]) == 0
    assert "charpoly: 1 2 -2 -4" in capsys.readouterr().out


def test_cli_zeros_stats_solve(tmp_path, capsys):
    z = tmp_path / "z.csv"
    assert main(["zeros", "--function", "dirichlet:5:2", "--window", "0.4,0.6,0.5,40", "--out", str(z)]) == 0
    assert main(["stats", "--zeros", str(z), "--report", "mean"]) == 0
    assert "mean_real=0.500000" in capsys.readouterr().out
    assert main(["solve-path", "--zeros-a", str(z), "--zeros-b", str(z), "--theta", "0.5", "--n", "6"]) == 0
    assert capsys.readouterr().out.startswith("condition=")


def test_cli_sweep_frames(tmp_path):
    out = tmp_path / "t.csv"
    frames = tmp_path / "frames"
    assert main(["sweep", "--family", "eta_rotation", "--steps", "2", "--theta-range", "0,1",
                 "--window", "0,1,10,30", "--out", str(out), "--frames", str(frames)]) == 0
    assert out.read_text().startswith("traj_id,theta,re,im,class")
    assert len(list(frames.glob("*.png"))) == 3


def test_cli_config(tmp_path, capsys):
    conf = tmp_path / "c.conf"
    conf.write_text("# defaults\nwindow = 0,1,10,30\nthreads=1\n")
    assert read_config(conf)["window"] == "0,1,10,30"
    assert main(["--config", str(conf), "zeros", "--function", "zeta"]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 4


def test_deterministic_outputs(tmp_path):
    digests = []
    for i in range(2):
        z = tmp_path / f"z{i}.csv"
        p = tmp_path / f"p{i}.png"
        main(["--seed", "5", "zeros", "--function", "random101", "--window", "0,1,1,20", "--out", str(z)])
        main(["--seed", "5", "plot", "--function", "zeta", "--window=-1,2,0,20", "--width", "30",
              "--height", "40", "--out", str(p)])
        digests.append((hashlib.sha256(z.read_bytes()).hexdigest(), hashlib.sha256(p.read_bytes()).hexdigest()))
    assert digests[0] == digests[1]


def test_cli_sweep_braid(tmp_path, capsys):
    out = tmp_path / "t.csv"
    assert main(["sweep", "--family", "char_rotation_10", "--steps", "64", "--theta-range", "1.5707963,7.8539816",
                 "--period", "6.2831853", "--terms", "60", "--window=-2,1,1,20", "--x-step", "0.05",
                 "--y-step", "0.02", "--out", str(out)]) == 0
    err = capsys.readouterr().err
    assert "exchanges=" in err and "unmatched=0" in err
    assert main(["sweep", "--family", "eta_rotation", "--steps", "2", "--theta-range", "0,1", "--period", "6.28",
                 "--window", "0,1,10,20", "--out", str(out)]) == 1
