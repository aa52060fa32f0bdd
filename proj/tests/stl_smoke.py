"""Reads deploy output with an independent STL reader; exits 77 when numpy-stl is absent."""
import pathlib
import shutil
import subprocess
import sys

try:
    import numpy as np
    from stl import mesh
except ImportError:
    print("numpy-stl not installed, skipping")
    sys.exit(77)

popup, config, work = sys.argv[1], sys.argv[2], pathlib.Path(sys.argv[3])
shutil.rmtree(work, ignore_errors=True)
for fmt in ("stl-bin", "stl-txt"):
    out = work / fmt
    subprocess.run([popup, "deploy", "--config", config, "--frames", "4", "--format", fmt, "--out", str(out)],
                   check=True)
    files = sorted(out.glob("*.stl"))
    assert len(files) == 4, files
    areas = []
    counts = set()
    for f in files:
        m = mesh.Mesh.from_file(str(f))
        counts.add(len(m.vectors))
        areas.append(float(m.areas.sum()))
        n = np.linalg.norm(m.normals, axis=1)
        assert np.all(n > 0), f
    assert len(counts) == 1, counts
    assert max(areas) - min(areas) < 1e-4 * max(areas), areas
    print(fmt, len(files), "frames,", counts.pop(), "triangles, area", areas[0])
