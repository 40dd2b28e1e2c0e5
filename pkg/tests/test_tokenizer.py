import numpy as np
import pytest

from conftest import make_plan, rect

from ergoplan import tokenizer
from ergoplan.dataset import SynthConfig, synth_plan
from ergoplan.errors import ContextOverflow, OutOfRange
from ergoplan.plan import RoomType
from ergoplan.tokenizer import TokenSequence, Vocabulary, decode, encode

V = Vocabulary(256)


def test_vocabulary_layout_frozen():
    assert V.boundary_token == 256
    assert V.door_token == 257
    assert V.room_token(RoomType.LivingRoom) == 258
    assert V.room_token(RoomType.WallIn) == 270
    assert V.bos == 271
    assert V.eos == 272
    assert V.pad == 273
    assert V.size == 274


def test_encode_boundary_door_only():
    plan = make_plan(
        boundary=((0, 0), (16, 0), (16, 16), (0, 16)),
        door=((0, 4), (0, 8)),
        rooms=[],
        resolution=256,
    )
    seq = encode(plan, V)
    s_b, s_d, bos, eos = V.boundary_token, V.door_token, V.bos, V.eos
    assert seq.tokens == (bos, s_b, 0, 0, 16, 0, 16, 16, 0, 16, s_d, 0, 4, 0, 8, eos)
    assert seq.xy_index == (0, 0, 1, 2, 1, 2, 1, 2, 1, 2, 0, 1, 2, 1, 2, 0)
    assert seq.vertex_index == (0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 0, 1, 1, 2, 2, 0)


def test_encode_kitchen_segment():
    plan = make_plan(
        boundary=((0, 0), (16, 0), (16, 16), (0, 16)),
        door=((0, 4), (0, 8)),
        rooms=[(RoomType.Kitchen, rect(0, 0, 8, 8))],
    )
    seq = encode(plan, V)
    start = seq.tokens.index(V.room_token(RoomType.Kitchen))
    assert seq.tokens[start + 1 : start + 9] == (0, 0, 8, 0, 8, 8, 0, 8)
    assert seq.xy_index[start : start + 9] == (0, 1, 2, 1, 2, 1, 2, 1, 2)
    assert seq.vertex_index[start : start + 9] == (0, 1, 1, 2, 2, 3, 3, 4, 4)
    assert seq.tokens[start + 9] == V.eos


def test_encode_context_overflow():
    plan = synth_plan(0)
    with pytest.raises(ContextOverflow):
        encode(plan, V, max_len=10)


def test_round_trip(tiling_plan, spread_plan):
    for plan in (tiling_plan, spread_plan):
        out = decode(encode(plan, V), V)
        assert out.ok and out.plan == plan


def test_round_trip_synthetic():
    cfg = SynthConfig(de_ergonomize_fraction=0.3)
    for seed in range(50):
        plan = synth_plan(seed, cfg)
        out = decode(encode(plan, V), V)
        assert out.ok and out.plan == plan


def test_missing_door_fails_at_room_start(tiling_plan):
    seq = list(encode(tiling_plan, V).tokens)
    door_at = seq.index(V.door_token)
    del seq[door_at : door_at + 5]
    out = decode(seq, V)
    assert not out.ok
    assert out.position == door_at
    assert "door" in out.reason


def test_odd_room_coordinates_fail(tiling_plan):
    seq = list(encode(tiling_plan, V).tokens)
    del seq[-2]  # drop one coordinate of the last room
    out = decode(seq, V)
    assert not out.ok
    assert "unpaired" in out.reason


def test_short_room_fails():
    s_r = V.room_token(RoomType.Kitchen)
    seq = (
        [V.bos, V.boundary_token, 0, 0, 16, 0, 16, 16, 0, 16]
        + [V.door_token, 0, 4, 0, 8]
        + [s_r, 1, 2, 3, 4]
        + [V.eos]
    )
    out = decode(seq, V)
    assert not out.ok
    assert "at least 4 vertices" in out.reason


def test_decode_reports_first_bad_position():
    out = decode([V.eos], V)
    assert not out.ok and out.position == 0
    out = decode([V.bos, V.bos], V)
    assert not out.ok and out.position == 1


def test_trailing_pad_allowed(tiling_plan):
    seq = list(encode(tiling_plan, V).tokens) + [V.pad, V.pad]
    assert decode(seq, V).ok
    seq.append(5)
    assert not decode(seq, V).ok


def test_decode_is_total_on_fuzz(rng):
    for _ in range(500):
        n = int(rng.integers(0, 60))
        seq = rng.integers(0, V.size, size=n).tolist()
        out = decode(seq, V)
        assert out.ok or (out.position is not None and out.reason)


def test_room_vertex_coordinate_classification(tiling_plan):
    seq = encode(tiling_plan, V)
    toks = seq.tokens
    # boundary coordinate
    assert not tokenizer.is_room_vertex_coordinate(seq, 2, V)
    # door coordinate
    door_at = toks.index(V.door_token)
    assert not tokenizer.is_room_vertex_coordinate(seq, door_at + 1, V)
    # kitchen's 3rd coordinate
    kitchen_at = toks.index(V.room_token(RoomType.Kitchen))
    assert tokenizer.is_room_vertex_coordinate(seq, kitchen_at + 3, V)
    # start tokens are not coordinates
    assert not tokenizer.is_room_vertex_coordinate(seq, kitchen_at, V)
    with pytest.raises(OutOfRange):
        tokenizer.is_room_vertex_coordinate(seq, len(seq), V)


def test_room_coordinate_positions_cover_all_rooms(spread_plan):
    seq = encode(spread_plan, V)
    positions = tokenizer.room_coordinate_positions(seq, V)
    # 6 rectangle rooms, 4 vertices, 2 coordinates each
    assert len(positions) == 6 * 4 * 2
    for pos, room_idx, vert_idx, axis in positions:
        token = seq.tokens[pos]
        expected = spread_plan.rooms[room_idx].vertices[vert_idx][axis]
        assert token == expected
        assert seq.xy_index[pos] == axis + 1
        assert seq.vertex_index[pos] == vert_idx + 1


def test_index_streams_pattern(rng):
    for seed in range(20):
        seq = encode(synth_plan(seed), V)
        assert len(seq.tokens) == len(seq.xy_index) == len(seq.vertex_index)
        xy, vert = tokenizer.indices_for_tokens(seq.tokens, V)
        assert xy == seq.xy_index and vert == seq.vertex_index
        # within every segment: xy pattern 0,(1,2)*; vertex 0,(k,k)*
        for i, t in enumerate(seq.tokens):
            if not V.is_coordinate(t):
                assert seq.xy_index[i] == 0 and seq.vertex_index[i] == 0


def test_boundary_door_prefix(tiling_plan):
    seq = encode(tiling_plan, V)
    prefix = tokenizer.boundary_door_prefix(seq, V)
    assert prefix[0] == V.bos
    assert prefix[-1] == 8  # last door coordinate
    assert V.room_type_of(seq.tokens[len(prefix)]) is not None


def test_token_line_round_trip(tiling_plan):
    seq = encode(tiling_plan, V)
    line = tokenizer.format_token_line(seq)
    parsed = tokenizer.parse_token_lines(line + "\n\n")
    assert parsed == [list(seq.tokens)]


def test_equal_length_streams_enforced():
    with pytest.raises(ValueError):
        TokenSequence((1, 2), (0,), (0, 0))
