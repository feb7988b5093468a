# %% [markdown]
# Contour correspondence
#
# Two frames of a wall outline become matched point sets: order each
# contour anti-clockwise around the cavity center, resample by arc length,
# then subtract.

# %%
import numpy as np

from myostrain.contours import Contour, centroid, compute_boundary_displacements, prepare_pair
from myostrain.synthetic import synthetic_cycle

doc = synthetic_cycle(20)
f0, f1 = doc.frames[0], doc.frames[9]   # end-diastole and near end-systole
print("inner points per frame:", len(f0.inner.points), "outer:", len(f0.outer.points))

# %%
# the reference point is the mean of the inner contour at the first frame
ref = centroid(f0.inner)
print("reference point:", ref.xy)

# %%
# clockwise storage is fine; ordering puts every contour anti-clockwise
flipped = Contour(f0.inner.points[::-1])
print("orientation of flipped copy:", flipped.orientation)

ref, p0, p1 = prepare_pair(f0, f1, count=32)
print("orientation after:", p0.inner.orientation, "points:", len(p0.inner.points))

# %%
field = compute_boundary_displacements(p0, p1)
r0 = np.linalg.norm(p0.inner.points - ref.xy, axis=1)
ur = np.einsum("ij,ij->i", field.inner, (p0.inner.points - ref.xy) / r0[:, None])
print("inner wall radial motion: min %.2f  max %.2f  mean %.2f" % (ur.min(), ur.max(), ur.mean()))
