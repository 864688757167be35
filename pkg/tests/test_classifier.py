import dataclasses
import itertools

import pytest

from emailnet import classifier as cl
from emailnet import graph_metrics as gm
from emailnet.graph_builder import CoRefGraph


def comp(edges):
    g = CoRefGraph()
    for a, b, w in edges:
        g.add_edge(a, b, w)
    return gm.Component("d1c1", g, 1)


def signals(c, stoplist=cl.DEFAULT_STOPLIST):
    return cl.extract_signals(c, gm.compute_metrics(c), stoplist)


def test_uniform_weights_cv_zero():
    c = comp([(a, b, 3) for a, b in itertools.combinations(["a@x.com", "b@x.com", "c@x.com"], 2)])
    assert signals(c).weight_cv == 0.0


def test_ubuntu_signals():
    names = [f"dev{i}@ubuntu.com" for i in range(5)]
    s = signals(comp([(names[0], n, 1) for n in names[1:]]))
    assert s.top_domain_share == 1.0 and s.stoplist_domain_hit


def test_alias_similarity_hand_computed():
    # jsmith/j.smith: 1 - 1/7; jsmith/jsmith99: 1 - 2/8; j.smith/jsmith99: 1 - 3/8
    expected = ((1 - 1 / 7) + (1 - 2 / 8) + (1 - 3 / 8)) / 3
    s = cl.alias_similarity(["jsmith@a.com", "j.smith@b.org", "jsmith99@c.net"])
    assert s == pytest.approx(expected)
    assert s > 0.6


def test_alias_pair_cap():
    names = [f"user{i:04d}@x.com" for i in range(200)]
    k = 142  # 142*141/2 = 10011 > 10000, 141*140/2 = 9870
    assert cl.alias_similarity(names) == cl.alias_similarity(sorted(names)[:141])
    assert 141 * 140 // 2 <= cl.MAX_ALIAS_PAIRS < k * (k - 1) // 2


def test_edit_distance():
    assert cl.edit_distance("kitten", "sitting") == 3
    assert cl.edit_distance("", "abc") == 3
    assert cl.edit_distance("same", "same") == 0


def test_stoplist_subdomains():
    assert cl.on_stoplist("lists.ubuntu.com", cl.DEFAULT_STOPLIST)
    assert not cl.on_stoplist("notubuntu.com", cl.DEFAULT_STOPLIST)
    assert cl.DEFAULT_STOPLIST == {"ubuntu.com", "canonical.com", "debian.org", "microsoft.com", "mozilla.org"}


def _hierarchy(domain):
    # tree of maintainers: structurally like a communication network
    edges = []
    top = f"boss@{domain}"
    for i in range(4):
        mid = f"lead{i}@{domain}"
        edges.append((top, mid, 5 + 7 * i))
        for j in range(5):
            edges.append((mid, f"dev{i}{j}@{domain}", 1 + j * 3))
    return comp(edges)


def test_ubuntu_hierarchy_not_useful():
    label = cl.classify(signals(_hierarchy("ubuntu.com")))
    assert (label.label, label.subtype) == (cl.Label.NOT_USEFUL, cl.Subtype.REPOSITORY_COAUTHOR)
    assert label.evidence


def test_same_shape_other_domain_not_flagged():
    label = cl.classify(signals(_hierarchy("corp.example")))
    assert label.subtype != cl.Subtype.REPOSITORY_COAUTHOR


def test_logon_near_clique():
    aliases = ["jsmith@gmail.com", "j.smith@yahoo.com", "jsmith99@hotmail.com",
               "jsmith7@aol.com", "john.smith@mail.com", "jsmith_1@outlook.com"]
    c = comp([(a, b, 40 + i) for i, (a, b) in enumerate(itertools.combinations(aliases, 2)) if i != 3])
    label = cl.classify(signals(c))
    assert (label.label, label.subtype) == (cl.Label.USEFUL, cl.Subtype.LOGON)


def test_software_artifact_band():
    names = [f"dev{i:02d}@bigsoft.com" for i in range(25)]
    c = comp([(names[i], names[j], 2) for i in range(25) for j in range(i + 1, min(25, i + 4))])
    label = cl.classify(signals(c))
    assert (label.label, label.subtype) == (cl.Label.NOT_USEFUL, cl.Subtype.SOFTWARE_ARTIFACT)


def test_hub_communication():
    owner = "me@home.net"
    contacts = [f"friend{i}@mail{i % 3}.com" for i in range(12)]
    edges = [(owner, c, max(1, 60 // (i + 1))) for i, c in enumerate(contacts)]
    edges += [(contacts[0], contacts[1], 2)]
    label = cl.classify(signals(comp(edges)))
    assert (label.label, label.subtype) == (cl.Label.USEFUL, cl.Subtype.COMMUNICATION)
    names = [e[0] for e in label.evidence]
    assert names == ["weight_cv", "degree_skew"]


def test_uncertain_default():
    c = comp([("a@x.com", "b@y.com", 1), ("b@y.com", "c@z.com", 1), ("c@z.com", "d@w.com", 1)])
    label = cl.classify(signals(c))
    assert label.label == cl.Label.UNCERTAIN and label.subtype is None and label.evidence == ()


def test_label_invariants_and_purity():
    for c in (_hierarchy("ubuntu.com"), _hierarchy("corp.example")):
        s = signals(c)
        a, b = cl.classify(s), cl.classify(s)
        assert a == b
        if a.label == cl.Label.USEFUL:
            assert a.subtype in (cl.Subtype.COMMUNICATION, cl.Subtype.LOGON)
        if a.label == cl.Label.NOT_USEFUL:
            assert a.subtype in (cl.Subtype.SOFTWARE_ARTIFACT, cl.Subtype.REPOSITORY_COAUTHOR)


def test_policy_file(tmp_path):
    p = tmp_path / "policy.cfg"
    p.write_text("# thresholds\nlogon_max_nodes = 3\ncomm_min_weight_cv=0.5\n")
    pol = cl.load_policy(p)
    assert pol.logon_max_nodes == 3 and isinstance(pol.logon_max_nodes, int)
    assert pol.comm_min_weight_cv == 0.5
    assert pol.repo_top_domain_share == 0.8
    p.write_text("no_such_key = 1\n")
    with pytest.raises(ValueError):
        cl.load_policy(p)


def test_packaged_policy_matches_defaults():
    from importlib import resources
    path = resources.files("emailnet").joinpath("data/policy.cfg")
    assert cl.load_policy(path) == cl.Policy()


def test_custom_stoplist(tmp_path):
    p = tmp_path / "stop.txt"
    p.write_text("# mine\nCorp.Example\n\n")
    assert cl.load_stoplist(p) == {"corp.example"}
    label = cl.classify(signals(_hierarchy("corp.example"), cl.load_stoplist(p)))
    assert label.subtype == cl.Subtype.REPOSITORY_COAUTHOR


def test_policy_thresholds_respected():
    s = signals(_hierarchy("ubuntu.com"))
    strict = dataclasses.replace(cl.Policy(), repo_top_domain_share=1.01)
    assert cl.classify(s, strict).subtype != cl.Subtype.REPOSITORY_COAUTHOR
