"""Exact realization of V_Q and its sigma-twisted modules on finite-degree states."""
