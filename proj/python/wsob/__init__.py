"""Admissible radii, Vitali coverings and weighted Sobolev norms on charted manifolds."""

import json

from ._wsob import (
    DomainError,
    FormField,
    Manifold,
    NumericalError,
    ParameterError,
    RadiusField,
    admissible_radius,
    builtin,
    builtin_window,
    bump,
    christoffel,
    constant,
    cover,
    d,
    is_admissible,
    load_manifold,
    lp_norm,
    manifold_from_json,
    overlap_bound,
    ricci_eigenvalues,
    run,
    sectional_curvature,
    sobolev_exponents,
    sobolev_norm,
)


def report(command, manifold, **options):
    """Run a CLI subcommand and return its parsed JSON report and exit code."""
    args = [command, "--manifold", str(manifold)]
    for key, value in options.items():
        flag = "--" + key.replace("_", "-")
        if value is True:
            args.append(flag)
        elif value is not False and value is not None:
            args += [flag, str(value)]
    code, out, err = run(args)
    if code == 2:
        raise ValueError(err.strip())
    return json.loads(out), code


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
