"""
Beam pattern and layout walk-through
====================================

Anchors of the tapered-aperture gain model, the 19-beam hexagonal layout,
and how boresight spacing sets the crossover depth between adjacent beams.
"""
import math

import numpy as np

from satnoma.chanmodel import (BeamPattern, beam_adjacency, beam_gain,
                               crossover_level_db, place_beams)

# the desk-scale pattern: 41 dBi peak, 0.2 degree half-power beamwidth
pattern = BeamPattern(g_max_db=41.0, theta_3db=math.radians(0.2))

print("boresight gain          :", beam_gain(0.0, pattern), "dBi")
print("gain at theta_3db       :", beam_gain(pattern.theta_3db, pattern), "dBi")
print("droop at theta_3db      :",
      beam_gain(pattern.theta_3db, pattern) - pattern.g_max_db, "dB (-3 by construction)")

# the main lobe rolls off monotonically; sample a few fractions of theta_3db
for frac in (0.25, 0.5, 1.0, 1.5, 2.0):
    rel = beam_gain(frac * pattern.theta_3db, pattern) - pattern.g_max_db
    print(f"  off-axis {frac:4.2f} * theta_3db: {rel:8.3f} dB")

# hexagonal rings: 1 center beam, 6 in the first ring, 12 in the second
layout = place_beams(19, spacing=math.radians(0.45))
d = np.hypot(layout.centers[:, 0], layout.centers[:, 1])
print("\n19-beam layout: center distances (deg):",
      np.round(np.degrees(np.unique(np.round(d, 12))), 4))
adj = beam_adjacency(layout)
print("adjacent pairs:", int(adj.sum()) // 2)

# crossover depth: the gain at the midpoint between adjacent boresights,
# relative to boresight. Wider spacing digs a deeper notch between beams.
print("\nspacing (deg) -> crossover (dB)")
for spacing_deg in (0.40, 0.45, 0.50, 0.55):
    lay = place_beams(19, spacing=math.radians(spacing_deg))
    print(f"  {spacing_deg:.2f} -> {crossover_level_db(lay, pattern):7.3f}")
print("(the 0.45 degree default lands in the single-digit-dB overlap regime",
      "that makes precoding worthwhile)")
