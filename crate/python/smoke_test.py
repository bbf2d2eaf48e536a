"""Smoke test for the Python bindings.

Build first with `cargo build --release -p mdsc-py`; the script loads the
resulting shared library from target/release.
"""

import importlib.util
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    built = ROOT / "target" / "release" / "libmdsc_py.so"
    if not built.exists():
        sys.exit(f"missing {built}; run `cargo build --release -p mdsc-py`")
    tmp = pathlib.Path(tempfile.mkdtemp())
    target = tmp / "mdsc_py.so"
    shutil.copy(built, target)
    spec = importlib.util.spec_from_file_location("mdsc_py", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    mdsc = load_module()

    assert set(mdsc.cases()) == {"sc-1.1", "gdmd-1.1", "sc-3.1", "gdmd-3.1"}

    params, m = mdsc.fixture("gdmd-3.1")
    assert (params.gamma, params.kappa, params.z, params.copies) == (3, 19, 23, 4)
    total = mdsc.count_cycles(params, m["partitioning"], m["lifting"], 8, m["relocation"])
    assert total == m["expected"] == 239_752, total

    report = mdsc.verify("sc-3.1")
    assert report["passed"] and report["actual"] == 1_397_319

    p_star, dist, summary = mdsc.grade(params, objective="cycle8", density=26.05)
    assert abs(sum(p_star) - 1.0) < 1e-9
    assert abs(sum(map(sum, dist.rows())) - 1.0) < 1e-9
    assert summary["objective_value"] <= summary["initial_objective"]
    fc = dist.forecast(params)
    assert 0 < fc["e_cycles"] <= fc["bounds"][1]

    result = mdsc.flao(params, m["partitioning"], m["lifting"], dist, seed=1)
    assert result["md_cycle_count"] <= result["initial_md_cycle_count"]

    try:
        mdsc.CodeParams(3, 5, 0, 4, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("z = 0 accepted")

    print(f"ok: {params!r}, forecast {fc['e_cycles']:.0f}, greedy {result['md_cycle_count']}")


if __name__ == "__main__":
    main()
