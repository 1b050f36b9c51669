"""Desk-scale verification toolkit for newform mass statistics.

Subpackages by concern:

* ``coeffcore``  -- coefficient generation (eta products), Hecke extension,
  Satake parameters, adjoint values, file ingestion
* ``weylint``    -- Iwahori-cell enumeration and local integrals at a prime
* ``shiftsum``   -- shifted convolution sums, sieve audits, weight integrals
* ``autoeval``   -- evaluation and quadrature on modular curves
* ``cli``        -- verification subcommands emitting canonical reports
"""

from .backend import USE_NUMBA, backend_name

__version__ = "0.1.0"

__all__ = ["USE_NUMBA", "backend_name", "__version__"]
