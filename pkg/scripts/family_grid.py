"""Classify d phi_3 = a phi_1 phibar_1 + b phi_2 phibar_2 over a grid of b (a fixed)."""

from dataclasses import dataclass

import numpy as np

from _config import parse_config
from hermitian_btp import catalog, classifier
from hermitian_btp.errors import Indeterminate


@dataclass
class Config:
    """Grid of b values in [-extent, extent]^2 with a fixed."""

    a: float = 1.0
    extent: float = 2.0
    steps: int = 9
    tol: float = 1e-9


def main(cfg: Config):
    axis = np.linspace(-cfg.extent, cfg.extent, cfg.steps)
    print(f"{'b':>14}  balanced  bkl    vaisman  btp    case")
    for x in axis:
        for y in axis:
            S = catalog.family_ab(cfg.a, complex(x, y)).S
            try:
                rep = classifier.classify(S, cfg.tol)
            except Indeterminate as exc:
                print(f"{complex(x, y):>14.3g}  indeterminate: {exc}")
                continue
            f = rep.flags
            print(f"{complex(x, y):>14.3g}  {f['balanced']!s:8}  {f['bkl']!s:5}  {f['vaisman']!s:7}  "
                  f"{f['btp_direct']!s:5}  {rep.threefold_case}")


if __name__ == "__main__":
    main(parse_config(Config))
