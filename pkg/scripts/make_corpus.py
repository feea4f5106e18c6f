#!/usr/bin/env python3
"""Generate the benchmark corpus deterministically.

The three classic JSON benchmark files are not vendored; this script
builds stand-ins with the same structural character and rough scale:

  canada.json        float-heavy geometry (coordinate pair polygons)
  citm_catalog.json  deep catalog with id-keyed maps and repetition
  twitter.json       unicode-heavy status objects (CJK text, emoji)

Seeded RNG, stable key order, repr-based floats: reruns are
byte-identical.
"""

import argparse
import json
import os
import random
import sys


def make_canada(rng):
    def ring(n, cx, cy):
        pts = []
        for _ in range(n):
            cx += rng.uniform(-0.25, 0.25)
            cy += rng.uniform(-0.25, 0.25)
            pts.append([round(cx, 6), round(cy, 6)])
        pts.append(pts[0])
        return pts

    features = []
    for i in range(12):
        cx = rng.uniform(-141.0, -52.0)
        cy = rng.uniform(41.0, 83.0)
        rings = [ring(rng.randint(400, 900), cx, cy)
                 for _ in range(rng.randint(1, 3))]
        features.append({
            "type": "Feature",
            "properties": {"name": f"region-{i:02d}"},
            "geometry": {"type": "Polygon", "coordinates": rings},
        })
    return {"type": "FeatureCollection", "features": features}


def make_citm(rng):
    names = ["Concert", "Opera", "Theatre", "Recital", "Festival",
             "Ballet", "Cinema", "Lecture"]
    events = {}
    performances = []
    for i in range(180):
        eid = str(100000000 + i)
        events[eid] = {
            "id": int(eid),
            "name": f"{rng.choice(names)} {i}",
            "description": None,
            "subTopicIds": [rng.randint(300, 360) for _ in range(3)],
            "topicIds": [rng.randint(300, 340) for _ in range(2)],
        }
        for _ in range(rng.randint(1, 3)):
            performances.append({
                "id": rng.randint(340000000, 350000000),
                "eventId": int(eid),
                "start": 1372701600000 + rng.randint(0, 10**9),
                "prices": [
                    {"amount": rng.randint(1000, 18000) / 100.0,
                     "audienceSubCategoryId": rng.randint(1, 5),
                     "seatCategoryId": rng.randint(1, 9)}
                    for _ in range(rng.randint(1, 4))
                ],
                "seatCategories": [
                    {"areas": [{"areaId": rng.randint(200, 260),
                                "blockIds": []}
                               for _ in range(rng.randint(1, 4))],
                     "seatCategoryId": rng.randint(1, 9)}
                    for _ in range(rng.randint(1, 3))
                ],
                "venueCode": "PLEYEL_PLEYEL",
            })
    return {
        "areaNames": {str(205705990 + i): f"Area {i}" for i in range(17)},
        "events": events,
        "performances": performances,
        "venueNames": {"PLEYEL_PLEYEL": "Salle Pleyel"},
    }


CJK = ("日本語のテキスト生成は楽しいです 毎日コードを書いています "
       "音楽と珈琲が好きです 東京の朝は静かです 猫がキーボードの上で寝ている")
EMOJI = ["\U0001F604", "\U0001F389", "\U0001F680", "✨", "\U0001F4BB"]


def make_twitter(rng):
    words = CJK.split()
    statuses = []
    for i in range(250):
        text = " ".join(rng.choice(words) for _ in range(rng.randint(6, 20)))
        if rng.random() < 0.5:
            text += rng.choice(EMOJI)
        statuses.append({
            "created_at": "Sun Aug 31 00:29:15 +0000 2014",
            "id": 505874924095815681 - i * 7919,
            "id_str": str(505874924095815681 - i * 7919),
            "text": text,
            "user": {
                "id": rng.randint(10**6, 10**9),
                "name": rng.choice(words),
                "screen_name": f"user_{i}",
                "followers_count": rng.randint(0, 50000),
                "friends_count": rng.randint(0, 5000),
                "profile_image_url":
                    "http://pbs.example.com/profile_images/x_normal.jpeg",
            },
            "retweet_count": rng.randint(0, 9000),
            "favorite_count": rng.randint(0, 9000),
            "entities": {
                "hashtags": [],
                "urls": [],
                "user_mentions": [
                    {"screen_name": f"user_{rng.randint(0, 249)}",
                     "indices": [0, 10]}
                    for _ in range(rng.randint(0, 2))
                ],
            },
            "lang": "ja",
        })
    return {"statuses": statuses,
            "search_metadata": {"completed_in": 0.087, "count": 250}}


GENERATORS = {
    "canada.json": (make_canada, 401),
    "citm_catalog.json": (make_citm, 402),
    "twitter.json": (make_twitter, 403),
}


def build(out_dir, force=False):
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name, (gen, seed) in GENERATORS.items():
        path = os.path.join(out_dir, name)
        if os.path.exists(path) and not force:
            continue
        doc = gen(random.Random(seed))
        with open(path, "w", encoding="utf-8") as f:
            json.dump(doc, f, ensure_ascii=False, separators=(",", ":"))
        written.append(path)
    return written


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default=os.path.join(
        os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
        "data", "corpus"))
    ap.add_argument("--force", action="store_true")
    ns = ap.parse_args()
    written = build(ns.out_dir, force=ns.force)
    for p in written:
        print(f"wrote {p} ({os.path.getsize(p)} bytes)", file=sys.stderr)


if __name__ == "__main__":
    main()
