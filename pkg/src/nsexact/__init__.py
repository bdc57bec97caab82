"""Exact Beltrami-type solutions of the Euler and Navier-Stokes equations, with
finite-difference verification, annulus eigenproblems and inviscid path limits."""

from . import eigen, fields, profiles, solutions, specfun, turbulence, verify

__all__ = ["eigen", "fields", "profiles", "solutions", "specfun", "turbulence", "verify"]
__version__ = "0.1.0"
