"""Boundary trace norms of Laplace eigenfunctions.

Thin wrapper over the compiled ``_tracelab`` extension.
"""

import json

from ._tracelab import (
    SCHEMA_VERSION,
    EigenmodeRecord,
    band_scaling,
    collar_profile,
    cylinder_mode,
    disc_mode,
    fem_eigs,
    hemisphere_mode,
    neumann_disc_mode,
    neumann_identity,
    ozawa_rectangle,
    rectangle_mode,
    rellich_residual,
    roundtrip_line,
    run_cli,
    scaled_sobolev_norm,
    trace_norm,
)


def cli_records(*args):
    """Run a CLI subcommand and return (exit code, parsed records)."""
    code, out, err = run_cli([str(a) for a in args])
    if code == 2:
        raise ValueError(err.strip())
    return code, [json.loads(line) for line in out.splitlines() if line.strip()]


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
