"""Synthetic short-axis contour sequences for demos and end-to-end tests."""
from __future__ import annotations

import numpy as np

from .contours import ContourFrame, normalize_contour
from .pipeline import ContourDocument


def _shape(theta, base, bumps):
    r = np.full_like(theta, base)
    for k, amp, phase in bumps:
        r = r + amp * np.cos(k * theta + phase)
    return r


def synthetic_cycle(n_frames: int = 20, n_points: int = 32, center=(40.0, 50.0),
                    inner_radius: float = 12.0, wall: float = 8.0, contraction: float = 0.25,
                    twist_deg: float = 6.0, subject: str = "synthetic", slice_id: int = 0) -> ContourDocument:
    """One contraction/relaxation cycle of a slightly irregular ventricle.

    The cavity shrinks by ``contraction`` at end-systole (mid-cycle) while
    the wall thickens at constant area, with a small rigid twist about the
    center. Units are arbitrary (pixel-like).
    """
    theta = 2 * np.pi * (np.arange(n_points) + 0.3) / n_points
    r_in0 = _shape(theta, inner_radius, [(2, 0.06 * inner_radius, 0.4), (3, 0.03 * inner_radius, 1.1)])
    r_out0 = r_in0 + _shape(theta, wall, [(1, 0.12 * wall, 2.0)])
    c = np.asarray(center, dtype=float)

    frames = []
    for t in range(n_frames):
        s = np.sin(np.pi * t / max(n_frames - 1, 1)) ** 2
        r_in = r_in0 * (1.0 - contraction * s)
        # incompressible-ish wall: keep the local annulus area
        r_out = np.sqrt(r_out0**2 - r_in0**2 + r_in**2)
        phi = theta + np.radians(twist_deg) * s
        ring = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        inner = normalize_contour(c + r_in[:, None] * ring)
        outer = normalize_contour(c + r_out[:, None] * ring)
        frames.append(ContourFrame(t, inner, outer))
    return ContourDocument(subject, slice_id, tuple(frames))


def transformed_copy(frame: ContourFrame, t: int, scale: float = 1.0, angle: float = 0.0,
                     shift=(0.0, 0.0), about=None) -> ContourFrame:
    """Frame scaled and rotated (radians) about ``about`` then shifted."""
    about = np.asarray(frame.inner.points.mean(axis=0) if about is None else about, dtype=float)
    cs, sn = np.cos(angle), np.sin(angle)
    R = scale * np.array([[cs, -sn], [sn, cs]])

    def move(pts):
        return about + (pts - about) @ R.T + np.asarray(shift, dtype=float)

    return ContourFrame(t, normalize_contour(move(frame.inner.points)), normalize_contour(move(frame.outer.points)))
