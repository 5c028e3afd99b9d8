"""Radar-camera extrinsic calibration with a bias-compensated PnP solver."""
