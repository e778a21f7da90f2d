"""Smoke test for the pyqgraph extension module."""

import csv
import io
import math

import pyqgraph


def close(a, b, tol=1e-8):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    path = pyqgraph.Graph.path(1.0)
    mus = [mu for mu, mult in path.eigenvalues(4) for _ in range(mult)]
    assert all(close(mu, (k * math.pi) ** 2) for k, mu in enumerate(mus)), mus

    star = pyqgraph.Graph.star3()
    assert star.eigenvalues(3)[1][1] == 2

    tadpole = pyqgraph.Graph.tadpole()
    assert tadpole.betti_number == 1
    phi = [tadpole.domain_report(n)["node_count"] for n in range(1, 6)]
    assert phi == [0, 1, 3, 2, 4], phi

    part = tadpole.minimal_partition(2)
    assert close(part["energy"], 0.25, 1e-9), part
    assert part["equipartition"]

    rows = list(csv.DictReader(io.StringIO(path.eigenfunction_csv(2, samples=3))))
    assert [r["edge_id"] for r in rows] == ["e"] * 3

    same = pyqgraph.Graph.from_json(path.to_json())
    assert same.eigenvalues(2) == path.eigenvalues(2)

    report = pyqgraph.verify_suite("courant", [pyqgraph.Graph.random_tree(4, seed=s) for s in range(3)], n_max=5)
    assert report["failed"] == 0, report

    try:
        pyqgraph.Graph.from_json("{bad")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed JSON accepted")

    print("pyqgraph smoke test passed")


if __name__ == "__main__":
    main()
