import io

import pytest

from emailnet import synth_corpus as sc
from emailnet.extractor import GZIP_MAGIC, ScanConfig, match_email, scan_image
from emailnet.graph_builder import build_graph
from emailnet.graph_metrics import connected_components


def scanned(img, config=None):
    return [(r.path.raw, r.address) for r in scan_image(img, config)]


def test_one_message_two_addresses():
    spec = sc.ScenarioSpec(60000, 1, clusters=[sc.ConversationCluster("c0", ["ann@x.org", "bob@y.org"], messages=1)])
    img, manifest = sc.generate_image(spec)
    assert len(img) == 60000
    assert len(scanned(img)) == 2 == len(manifest)
    assert scanned(img) == manifest.expected_records()


def test_two_clusters_two_components():
    spec = sc.two_cluster_scenario(3, separation=4096)
    img, manifest = sc.generate_image(spec)
    comps = connected_components(build_graph(scan_image(img), 4096))
    groups = manifest.node_groups()
    assert len(comps) == 2
    assert all(len({groups[a] for a in c.subgraph.nodes}) == 1 for c in comps)


def test_deterministic():
    spec = sc.owner_drive_scenario(8)
    a = sc.generate_image(spec)
    b = sc.generate_image(sc.owner_drive_scenario(8))
    assert a[0] == b[0] and a[1].to_text() == b[1].to_text()
    assert sc.generate_image(sc.owner_drive_scenario(9))[0] != a[0]


def test_overflow():
    spec = sc.owner_drive_scenario(1)
    spec.image_size = 1000
    with pytest.raises(sc.SpecOverflowError):
        sc.generate_image(spec)


def test_manifest_text_round_trip():
    _, m = sc.generate_image(sc.shape_scenario(4, "logon"))
    back = sc.Manifest.from_text(m.to_text())
    assert back == m and back.comments == m.comments
    line = m.to_text().splitlines()[2]
    assert len(line.split("\t")) == 5


def test_scenario_file_round_trip(tmp_path):
    spec = sc.server_drive_scenario(2, 3)
    path = tmp_path / "scenario.json"
    spec.dump(path)
    again = sc.ScenarioSpec.load(path)
    assert again == spec
    assert sc.generate_image(again)[0] == sc.generate_image(spec)[0]


@pytest.mark.parametrize("shape", sc.SHAPES)
def test_scan_recovers_manifest(shape, backend):
    for seed in range(3):
        img, manifest = sc.generate_image(sc.shape_scenario(seed, shape))
        assert scanned(img) == manifest.expected_records()


def test_compressed_regions_and_nesting():
    for depth in (1, 2, 3):
        spec = sc.two_cluster_scenario(6, compressed_fraction=1.0)
        spec.compressed_depth = depth
        spec = sc._fit(spec)
        img, manifest = sc.generate_image(spec)
        paths = scanned(img)
        assert paths == manifest.expected_records()
        assert all(p.count("-GZIP") == depth for p, _ in paths)


def test_write_image_streams_same_bytes(tmp_path):
    spec = sc.owner_drive_scenario(5)
    img, manifest = sc.generate_image(spec)
    with open(tmp_path / "img", "wb") as fh:
        m2 = sc.write_image(spec, fh)
    assert (tmp_path / "img").read_bytes() == img and m2 == manifest


def test_filler_pieces_are_independently_clean(monkeypatch):
    monkeypatch.setattr(sc, "FILLER_PIECE", 4096)
    spec = sc.shape_scenario(2, "software")
    img, manifest = sc.generate_image(spec)
    assert scanned(img) == manifest.expected_records()
    assert scanned(img, ScanConfig(chunk_size=3000, overlap=1024)) == manifest.expected_records()


def test_scrub_destroys_planted_noise():
    buf = bytearray(b"xx a@b.co yy " + GZIP_MAGIC + b" q@rr.com" + "u@vv.org".encode("utf-16-le") + b" z@x.co@y.org")
    sc._scrub(buf)
    assert sc._accidental_hits(bytes(buf)) == []
    assert GZIP_MAGIC not in buf
    assert match_email(bytes(buf)) == []


def test_truth_and_owner_flags():
    _, m = sc.generate_image(sc.owner_drive_scenario(3))
    owners = m.owners()
    assert len(owners) == 1
    owner = next(iter(owners))
    assert m.node_groups()[owner] == "*"
    assert sc.component_truth([owner], m) == "USEFUL"
