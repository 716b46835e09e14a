"""Python bindings for the sqltpl C++ core."""

from ._sqltpl import (
    Catalog,
    IngestResult,
    Inventory,
    SqltplError,
    coverage,
    fit_loglog,
    fit_points,
    gof,
    ingest,
    lex,
    load_catalogs,
    match,
    profile,
    run_cli,
    sample_power_law,
    spearman,
    spectrum,
    templatize,
)

__all__ = [
    "Catalog",
    "IngestResult",
    "Inventory",
    "SqltplError",
    "coverage",
    "fit_loglog",
    "fit_points",
    "gof",
    "ingest",
    "lex",
    "load_catalogs",
    "match",
    "profile",
    "run_cli",
    "sample_power_law",
    "spearman",
    "spectrum",
    "templatize",
]
