import os
import random

import pytest

import hornet
import oracle


def test_fs_matches_oracle_and_opens():
    sv, key = os.urandom(16), os.urandom(16)
    fs = hornet.fs_create(sv, key, next_hop=7, egress_link=3, flags=1, exp=123456)
    assert fs == oracle.fs_create(sv, key, 7, 3, 1, 123456)
    opened = hornet.fs_open(sv, fs)
    assert opened == {"key": key, "next_hop": 7, "egress_link": 3, "flags": 1, "exp": 123456}


def test_fs_under_wrong_secret_fails_pad_check():
    fs = hornet.fs_create(os.urandom(16), os.urandom(16), next_hop=1, exp=10)
    with pytest.raises(hornet.HornetError):
        hornet.fs_open(os.urandom(16), fs)


@pytest.mark.parametrize("hops", [1, 3, 7])
def test_ahdr_walk(hops):
    now, exp = 1000, 2000
    svs = [os.urandom(16) for _ in range(hops)]
    keys = [os.urandom(16) for _ in range(hops)]
    fses = [hornet.fs_create(svs[i], keys[i], next_hop=i + 1, exp=exp) for i in range(hops)]
    header = hornet.create_ahdr(keys, fses, 42)
    assert len(header) == hornet.AHDR_SIZE
    for i in range(hops):
        step = hornet.proc_ahdr(svs[i], header, now)
        assert step["key"] == keys[i]
        assert step["next_hop"] == i + 1
        assert step["next"] == oracle.proc_ahdr(keys[i], header)
        header = step["next"]


def test_ahdr_rejects_any_flip_and_expiry():
    sv, key = os.urandom(16), os.urandom(16)
    header = hornet.create_ahdr([key], [hornet.fs_create(sv, key, next_hop=2, exp=50)], 1)
    rng = random.Random(5)
    for _ in range(64):
        bit = rng.randrange(len(header) * 8)
        bad = bytearray(header)
        bad[bit // 8] ^= 1 << (bit % 8)
        with pytest.raises(hornet.HornetError):
            hornet.proc_ahdr(sv, bytes(bad), 10)
    with pytest.raises(hornet.HornetError) as info:
        hornet.proc_ahdr(sv, header, 50)
    assert info.value.code == "SessionExpired"


def test_onion_layers():
    key, iv, payload = os.urandom(16), os.urandom(16), os.urandom(512)
    out, iv2 = hornet.add_layer(key, iv, payload)
    assert out == oracle.ctr(oracle.subkey(key, "enc"), iv, payload)
    assert iv2 == oracle.ecb(oracle.subkey(key, "prp"), iv)
    assert hornet.remove_layer(key, iv2, out) == (payload, iv)


def test_garbage_packet_is_rejected():
    with pytest.raises(hornet.HornetError):
        hornet.packet_info(b"\x00" * 10)
