#!/usr/bin/env python3
"""Regenerate crates/core/data/design-vectors-16d.txt.

Synthetic word vectors: each concept cluster gets a random centroid and each
word is centroid + noise, so in-cluster cosines are high and cross-cluster
cosines are low. The file is a small test asset, not a trained model.
"""
import numpy as np

CLUSTERS = {
    "portability": "portable compact lightweight handheld small mobile foldable carry light",
    "power": "battery power energy charge capacitor efficiency solar runtime consumption brightness",
    "durability": "durable robust sturdy reliable fragile wear corrosion fatigue crack break strength",
    "comfort": "noise loud quiet vibration comfort heat hot sweat discomfort",
    "ease": "intuitive simple easy assemble assembly setup accessible modular integrated adjustable",
    "cost": "cheap affordable expensive cost price budget",
    "safety": "safety hazard injury risk unstable stability tip fall pinch",
    "upkeep": "maintenance repair clean replace calibration tolerance precision accuracy alignment",
    "performance": "speed thrust lift airflow flow pressure torque load weight payload range run",
    "making": "print machine manufacture fabrication material plastic metal weld module",
    "generic": "design device user part system feature product time good work",
}

def main():
    rng = np.random.default_rng(20240422)
    dim = 16
    lines = []
    for words in CLUSTERS.values():
        centroid = rng.normal(size=dim)
        centroid /= np.linalg.norm(centroid)
        for w in words.split():
            v = 0.8 * centroid + 0.35 * rng.normal(size=dim) / np.sqrt(dim)
            lines.append(w + " " + " ".join(f"{x:.6f}" for x in v))
    with open("crates/core/data/design-vectors-16d.txt", "w") as f:
        f.write("\n".join(lines) + "\n")

if __name__ == "__main__":
    main()
