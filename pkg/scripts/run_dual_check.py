#!/usr/bin/env python3
"""Girth duality sweep: primal vs dual girth over a small family of body
pairs, printed as a table.

Usage: python scripts/run_dual_check.py [--seed N] [--starts K]
"""

import argparse

import numpy as np

from girthlab import (
    EmbeddedSphere,
    GirthOptions,
    dual_girth,
    girth,
    make_ellipsoid,
    make_power_mean,
)


def rot(a, b):
    ca, sa, cb, sb = np.cos(a), np.sin(a), np.cos(b), np.sin(b)
    Rz = np.array([[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]])
    Rx = np.array([[1.0, 0.0, 0.0], [0.0, cb, -sb], [0.0, sb, cb]])
    return Rz @ Rx


def pairs():
    euclid = make_ellipsoid(np.eye(3), label="euclid")
    aniso = make_ellipsoid(np.diag([1.0, 1.5625, 1.0 / 0.36]), label="e-086")
    tilt = make_ellipsoid(
        rot(0.4, 0.9) @ np.diag([0.8, 1.6, 2.5]) @ rot(0.4, 0.9).T, label="e-tilt"
    )
    pm4 = make_power_mean([np.diag([1.0, 2.0, 0.5]), np.eye(3)], 4, label="pm4")
    pm6 = make_power_mean(
        [np.eye(3), rot(0.7, 0.2) @ np.diag([2.2, 0.6, 1.1]) @ rot(0.7, 0.2).T],
        6,
        label="pm6",
    )
    yield aniso, euclid
    yield aniso, pm4
    yield pm6, tilt
    yield pm4, pm4
    yield tilt, pm6


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--starts", type=int, default=4)
    args = ap.parse_args()
    opts = GirthOptions(N=16, starts=args.starts, seed=args.seed)
    print(f"{'base':>8} {'ambient':>8} {'girth':>12} {'dual girth':>12} {'rel gap':>10}")
    for b1, b2 in pairs():
        s = EmbeddedSphere(b1, b2)
        g = girth(s, opts).girth
        gd = dual_girth(s, opts).girth
        print(
            f"{b1.label:>8} {b2.label:>8} {g:12.8f} {gd:12.8f} {abs(g - gd) / g:10.2e}"
        )


if __name__ == "__main__":
    main()
