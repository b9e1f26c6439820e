"""Turn a dataclass into an argparse CLI (one ``--field`` flag per field)."""

import argparse
import dataclasses


def parse_config(cls, argv=None):
    p = argparse.ArgumentParser(description=cls.__doc__)
    for f in dataclasses.fields(cls):
        p.add_argument(f"--{f.name.replace('_', '-')}", type=type(f.default), default=f.default)
    return cls(**vars(p.parse_args(argv)))
