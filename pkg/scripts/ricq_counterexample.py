"""Show that Ric(Q) can vanish while Q does not, and that this cannot happen for n = 3, 4 samples."""

from dataclasses import dataclass

import numpy as np

from _config import parse_config
from hermitian_btp import catalog, classifier
from hermitian_btp.engine import geometry


@dataclass
class Config:
    samples: int = 200
    seed: int = 0


def main(cfg: Config):
    D = geometry(catalog.ricq_counterexample5().S).derived
    print(f"n=5 example: max|Ric(Q)| = {np.abs(D.ricQ).max():.2e}, max|Q| = {np.abs(D.Q).max():.4f}")
    rng = np.random.default_rng(cfg.seed)
    found = 0
    for _ in range(cfg.samples):
        n = int(rng.integers(3, 5))
        S = catalog.random_2step(int(rng.integers(2**31)), n, int(rng.integers(1, n)), 0.3)
        if not classifier.is_btp_direct(S).flag:
            continue
        d = geometry(S).derived
        if np.abs(d.ricQ).max() < 1e-10:
            found += 1
            assert np.abs(d.Q).max() < 1e-9, S.name
    print(f"{found} BTP samples with n in (3, 4) and Ric(Q) = 0; all have Q = 0")


if __name__ == "__main__":
    main(parse_config(Config))
