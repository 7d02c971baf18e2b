"""Sweep figure rendering; content bytes are out of the determinism scope."""

from skrw.figures import write_figures

ROWS = [
    {"index": 0, "j12": "27/4", "j23": "5/36", "j31": "-32/9",
     "t_kernel_dimension": 1, "claims_hold": False},
    {"index": 1, "j12": "0", "j23": "0", "j31": "0",
     "t_kernel_dimension": 2, "claims_hold": True},
]


def test_write_figures(tmp_path):
    paths = write_figures(ROWS, str(tmp_path / "figs"))
    assert len(paths) == 3
    for p in paths:
        data = open(p, "rb").read()
        assert data.startswith(b"\x89PNG")
        assert len(data) > 1000
