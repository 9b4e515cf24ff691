"""Command lines shared by the golden-file and determinism tests."""

from pathlib import Path

GOLDEN_DIR = Path(__file__).parent / "golden"
SMALL_CFG = str(GOLDEN_DIR / "small.cfg")

CASES = {
    "forward_classical2d": ["forward", "--case", "classical2d", "--field", "gaussian()",
                            "--grid", "angles=4,offsets=-2:2:5"],
    "forward_classical3d_planes": ["forward", "--case", "classical3d_planes", "--field", "ball_bump(radius=1.5)",
                                   "--grid", "order=3,offsets=0:2:3"],
    "forward_classical3d_lines": ["forward", "--case", "classical3d_lines", "--field", "gaussian(scale=0.8)",
                                  "--grid", "order=3,azimuths=2,offsets=0:1:2"],
    "forward_grass14": ["forward", "--field", "shell_bump(r0=1,r1=2)", "--grid", "planes=2,offsets=0:3:4",
                        "--config", SMALL_CFG],
    "forward_json": ["forward", "--case", "classical2d", "--field", "gaussian()", "--grid", "angles=2,offsets=0:1:2",
                     "--format", "json"],
    "slice_check_classical2d": ["slice-check", "--case", "classical2d", "--probes", "4"],
    "slice_check_grass14": ["slice-check", "--probes", "3", "--config", SMALL_CFG],
    "moments_grass14": ["moments", "--kmax", "2", "--probes", "1", "--config", SMALL_CFG],
    "moments_classical3d_planes": ["moments", "--case", "classical3d_planes", "--kmax", "2", "--probes", "2",
                                   "--config", SMALL_CFG],
    "invert_grass14": ["invert", "--probes", "4", "--config", SMALL_CFG, "--tol", "1"],
    "support_pw": ["support", "--mode", "pw", "--field", "shell_bump(r0=2,r1=3)", "--mode-args", "R=3,imax=2,kmax=1",
                   "--config", SMALL_CFG],
    "support_truncate": ["support", "--mode", "truncate", "--field", "shell_bump(r0=1,r1=2)",
                         "--mode-args", "R=2,probes=3", "--config", SMALL_CFG, "--tol", "1"],
    "support_hyperplane": ["support", "--mode", "hyperplane", "--case", "classical3d_lines",
                           "--field", "ball_bump(radius=1)", "--mode-args", "domain=ball,r=2,count=3",
                           "--config", SMALL_CFG],
    "funk_table": ["funk-table", "--lmax", "16"],
}


def golden_path(name: str) -> Path:
    suffix = ".json" if "--format" in CASES[name] and "json" in CASES[name] else ".csv"
    return GOLDEN_DIR / f"{name}{suffix}"
