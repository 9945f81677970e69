"""SIEE minimization for multi-base-station downlink systems."""
