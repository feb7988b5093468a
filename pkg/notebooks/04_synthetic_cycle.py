# %% [markdown]
# A full synthetic cycle
#
# Twenty frames of a contracting and relaxing ventricle go through the
# pipeline. Each consecutive pair gets its own mesh and solve; sector means
# are written as CSV files.

# %%
import tempfile
from pathlib import Path

import numpy as np

from myostrain.pipeline import PipelineConfig, run_deformation_pipeline, write_outputs
from myostrain.synthetic import synthetic_cycle

doc = synthetic_cycle(20)
bundle = run_deformation_pipeline(doc, PipelineConfig(points=32, layers=4))
print(len(bundle.pairs), "pairs,", len(bundle.failures), "failures")

# %%
# average of the sector means for the first few pairs
for pr in bundle.pairs[:5]:
    m = np.nanmean(pr.sectors.means, axis=0)
    print("%2d->%2d  eps_x %+.4f  eps_y %+.4f  gamma %+.4f" % (pr.t0, pr.t1, *m))

# %%
out = Path(tempfile.mkdtemp())
paths = write_outputs(bundle, out)
print(len(paths), "files in", out)
print((out / "sector_strain.csv").read_text().splitlines()[:4])
