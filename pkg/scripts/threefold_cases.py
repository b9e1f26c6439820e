"""Sample the threefold family and tabulate admissible-frame eigenvalues and case labels."""

from collections import Counter
from dataclasses import dataclass

import numpy as np

from _config import parse_config
from hermitian_btp import catalog, classifier


@dataclass
class Config:
    """Random b drawn uniformly from a square; a = 1."""

    count: int = 20
    seed: int = 0
    extent: float = 3.0
    tol: float = 1e-9


def main(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    tally = Counter()
    for _ in range(cfg.count):
        b = complex(*rng.uniform(-cfg.extent, cfg.extent, size=2))
        S = catalog.family_ab(1, b).S
        tf = classifier.threefold_case(S, cfg.tol)
        adm = classifier.admissible_frame(S, cfg.tol)
        cert, _ = classifier.bismut_abelian_certificate(S, cfg.tol)
        tally[tf.case] += 1
        print(f"b={b:.3f}  lambda={adm.lam:.4f}  a1={tf.a[0]:.4f}  a2={tf.a[1]:.4f}  "
              f"|s|={abs(tf.s):.2e}  |t|={abs(tf.t):.2e}  {tf.case}  certificate={cert}")
    print(dict(tally))


if __name__ == "__main__":
    main(parse_config(Config))
