"""Unit tests for featurization, encoder layers, the model and checkpoints."""

import numpy as np
import pytest

from rxnemb.autodiff import AdamState, Tape, Tensor, adam_step, backward, ops
from rxnemb.chem import Reaction, parse_molecule, parse_reaction
from rxnemb.core.errors import CheckpointError, LayerCountMismatch, ShapeMismatch, TooManyComponents
from rxnemb.core.types import Activation, EncoderConfig, JKMode, SidePool
from rxnemb.encoder import (
    ATOM_FEATURE_DIM,
    ModelCheckpoint,
    attention_pool,
    checkpoint_bytes,
    classify_real,
    embed_reaction,
    embed_reactions,
    featurize_atoms,
    forward,
    gcn_forward,
    jumping_knowledge,
    load_checkpoint,
    normalize_adjacency,
    pad_molecule_set,
    parameter_shapes,
    parse_checkpoint,
    prepare_reaction,
    reaction_logits,
    save_checkpoint,
    side_pool,
    transformer_layer,
)
from tests.utils import SHIFT_INVARIANT_SUFFIXES, check_model_gradients


def reversed_sides(rxn: Reaction) -> Reaction:
    return Reaction(rxn.id, rxn.product_components, rxn.reactant_components, rxn.class_label)


def permuted(rxn: Reaction, seed: int) -> Reaction:
    rng = np.random.default_rng(seed)
    reactants = [rxn.reactant_components[i] for i in rng.permutation(len(rxn.reactant_components))]
    products = [rxn.product_components[i] for i in rng.permutation(len(rxn.product_components))]
    return Reaction(rxn.id, tuple(reactants), tuple(products), rxn.class_label)


class TestFeaturize:
    """Test atom features and adjacency."""

    def test_methane_columns(self):
        """Test the one-hot slots set for a lone carbon."""
        features = featurize_atoms(parse_molecule("C")).data

        assert features.shape == (1, ATOM_FEATURE_DIM)
        assert np.flatnonzero(features[0]).tolist() == [1, 11, 19, 27]

    def test_charge_aromatic_and_other(self):
        """Test charge, aromatic flag and the catch-all element slot."""
        anion = featurize_atoms(parse_molecule("[O-]")).data[0]
        aromatic = featurize_atoms(parse_molecule("c1ccccc1")).data[0]
        sodium = featurize_atoms(parse_molecule("[Na+]")).data[0]

        assert anion[17 + (-1) + 2] == 1
        assert aromatic[22] == 1
        assert sodium[10] == 1

    def test_adjacency_single_atom(self):
        """Test a lone atom normalizes to [[1]]."""
        np.testing.assert_allclose(normalize_adjacency(parse_molecule("C")).data, [[1.0]])

    def test_adjacency_pair(self):
        """Test two bonded atoms give 0.5 everywhere."""
        np.testing.assert_allclose(normalize_adjacency(parse_molecule("CC")).data, np.full((2, 2), 0.5))

    def test_adjacency_ignores_bond_order(self):
        """Test C=O and C-O share an adjacency."""
        np.testing.assert_array_equal(
            normalize_adjacency(parse_molecule("C=O")).data, normalize_adjacency(parse_molecule("CO")).data
        )


class TestLayers:
    """Test encoder building blocks."""

    def test_gcn_with_zero_weights(self):
        """Test zero weights give act(bias) on every row."""
        h = Tensor(np.ones((3, 4)))
        adj = normalize_adjacency(parse_molecule("CCC"))
        out = gcn_forward(h, adj, Tensor(np.zeros((4, 2))), Tensor([0.5, -0.5]), Activation.RELU).data

        np.testing.assert_allclose(out, [[0.5, 0.0]] * 3)

    def test_gcn_adjacency_shape(self):
        """Test the adjacency must match the node count."""
        with pytest.raises(ShapeMismatch):
            gcn_forward(Tensor(np.ones((3, 4))), Tensor(np.eye(2)), Tensor(np.zeros((4, 2))))

    def test_jumping_knowledge_last(self):
        """Test LAST returns the final layer output."""
        layers = [Tensor(np.full((2, 3), float(i))) for i in range(3)]

        np.testing.assert_array_equal(jumping_knowledge(layers, JKMode.LAST).data, layers[-1].data)

    def test_jumping_knowledge_concat_project(self):
        """Test concatenation followed by projection."""
        layers = [Tensor(np.ones((2, 3))), Tensor(2 * np.ones((2, 3)))]
        weight = Tensor(np.ones((6, 1)))

        out = jumping_knowledge(layers, JKMode.CONCAT_PROJECT, weight, Tensor([0.0]))

        np.testing.assert_allclose(out.data, [[9.0], [9.0]])

    def test_jumping_knowledge_layer_count(self):
        """Test the layer count is checked."""
        with pytest.raises(LayerCountMismatch):
            jumping_knowledge([Tensor(np.ones((2, 3)))], JKMode.LAST, expected=2)

    def test_attention_pool_single_atom(self):
        """Test a one-atom molecule gets weight 1."""
        h = Tensor([[1.0, 2.0]])
        vecs, weights = attention_pool(h, Tensor([[0.3], [0.1]]), Tensor([0.0]), Tensor(np.eye(2)))

        assert weights.data[0, 0] == pytest.approx(1.0)
        np.testing.assert_allclose(vecs.data, [[1.0, 2.0]])

    def test_attention_pool_membership(self):
        """Test weights stay inside each molecule and sum to one."""
        h = Tensor(np.arange(10, dtype=np.float32).reshape(5, 2))
        membership = np.array([[True, True, False, False, False], [False, False, True, True, True]])

        _, weights = attention_pool(h, Tensor([[0.2], [-0.1]]), Tensor([0.0]), Tensor(np.eye(2)), membership)

        np.testing.assert_allclose(weights.data.sum(axis=1), [1.0, 1.0], rtol=1e-6)
        assert np.all(weights.data[~membership] == 0.0)

    def test_pad_molecule_set(self):
        """Test padding rows and mask."""
        padded, mask = pad_molecule_set(Tensor(np.ones((2, 3))), 4)

        assert padded.shape == (4, 3)
        assert mask.tolist() == [True, True, False, False]
        assert np.all(padded.data[2:] == 0)

    def test_pad_too_many(self):
        """Test more molecules than slots."""
        with pytest.raises(TooManyComponents):
            pad_molecule_set(Tensor(np.ones((3, 2))), 2)

    def test_transformer_single_row_attends_to_itself(self, random_model):
        """Test one real row puts all attention on itself."""
        params = {
            name[len("reactant.tf.0.") :]: Tensor(value)
            for name, value in random_model.parameters.items()
            if name.startswith("reactant.tf.0.")
        }
        x = Tensor(np.random.default_rng(0).standard_normal((3, 8)))

        out, attn = transformer_layer(x, np.array([True, False, False]), params, heads=2)

        np.testing.assert_allclose(attn[:, 0, 0], [1.0, 1.0])
        assert np.all(attn[:, 1:, :] == 0)
        assert np.all(out.data[1:] == 0)

    def test_side_pool_modes(self):
        """Test masked mean and sum."""
        x = Tensor([[1.0, 2.0], [3.0, 4.0], [100.0, 100.0]])
        mask = np.array([True, True, False])

        np.testing.assert_allclose(side_pool(x, mask, SidePool.MEAN).data, [[2.0, 3.0]])
        np.testing.assert_allclose(side_pool(x, mask, SidePool.SUM).data, [[4.0, 6.0]])

    def test_zero_classifier_gives_half(self):
        """Test zero weights and bias give p(real) = 0.5."""
        params = {"classifier.weight": Tensor(np.zeros((4, 1))), "classifier.bias": Tensor([0.0])}

        p = classify_real(Tensor(np.ones((2, 4))), params).data

        np.testing.assert_allclose(p, [[0.5], [0.5]])


class TestModel:
    """Test the dual-encoder model."""

    def test_parameter_shapes_are_side_disjoint(self, small_encoder_config):
        """Test each side has its own full parameter set."""
        shapes = parameter_shapes(small_encoder_config)
        reactant = {k[len("reactant.") :] for k in shapes if k.startswith("reactant.")}
        product = {k[len("product.") :] for k in shapes if k.startswith("product.")}

        assert reactant == product
        assert "reactant.jk.weight" in shapes
        assert shapes["interaction.in.weight"] == (3 * 8, 8)

    def test_last_mode_has_no_projection(self, small_encoder_config):
        """Test JK LAST drops the projection parameters."""
        config = small_encoder_config.model_copy(update={"jk_mode": JKMode.LAST})

        assert not any(".jk." in name for name in parameter_shapes(config))

    def test_init_is_seeded(self, small_encoder_config):
        """Test equal seeds give equal weights."""
        a = ModelCheckpoint.init(small_encoder_config, seed=5)
        b = ModelCheckpoint.init(small_encoder_config, seed=5)

        assert checkpoint_bytes(a) == checkpoint_bytes(b)

    def test_minimal_reaction_embeds(self, random_model):
        """Test C>>C gives a finite vector of emb_dim entries."""
        vec, _ = embed_reaction(random_model, parse_reaction("C>>C", "x"))

        assert vec.shape == (8,)
        assert np.all(np.isfinite(vec))

    def test_padding_invariance(self, random_model, sample_reactions):
        """Test extra padding slots leave the embedding bit-identical."""
        for rxn in sample_reactions:
            count = max(len(rxn.reactant_components), len(rxn.product_components))
            tight, _ = embed_reaction(random_model, rxn, max_components=count)
            loose, _ = embed_reaction(random_model, rxn, max_components=count + 8)

            np.testing.assert_array_equal(tight, loose)

    def test_permutation_invariance(self, random_model, sample_reactions):
        """Test reordering molecules within a side keeps the embedding."""
        for seed, rxn in enumerate(sample_reactions):
            base, _ = embed_reaction(random_model, rxn)
            shuffled, _ = embed_reaction(random_model, permuted(rxn, seed))

            np.testing.assert_allclose(shuffled, base, atol=1e-5)

    def test_direction_matters(self, random_model):
        """Test swapping reactants and products changes the embedding."""
        rxn = parse_reaction("CCO.CC(=O)O>>CC(=O)OCC", "x")

        forward_vec, _ = embed_reaction(random_model, rxn)
        backward_vec, _ = embed_reaction(random_model, reversed_sides(rxn))

        assert not np.allclose(forward_vec, backward_vec, atol=1e-4)

    def test_attention_bundle(self, random_model, sample_reactions):
        """Test pooling weights per molecule sum to one."""
        rxn = sample_reactions[0]
        _, bundle = embed_reaction(random_model, rxn)

        for side, components in rxn.sides():
            weights = bundle.pool_weights[side]
            assert len(weights) == len(components)
            for graph, w in zip(components, weights):
                assert w.shape == (graph.num_atoms,)
                assert w.sum() == pytest.approx(1.0, abs=1e-5)
            assert len(bundle.layer_attention[side]) == random_model.config.tf_layers

    def test_batched_matches_single(self, random_model, sample_reactions):
        """Test batch embedding agrees with one-at-a-time embedding."""
        batched = embed_reactions(random_model, sample_reactions, batch_size=4)

        for row, rxn in zip(batched, sample_reactions):
            single, _ = embed_reaction(random_model, rxn)
            np.testing.assert_allclose(row, single, atol=1e-4)

    def test_worker_count_does_not_change_result(self, random_model, sample_reactions):
        """Test threaded batches give identical output."""
        one = embed_reactions(random_model, sample_reactions, batch_size=2, workers=1)
        many = embed_reactions(random_model, sample_reactions, batch_size=2, workers=3)

        np.testing.assert_array_equal(one, many)

    def test_empty_input(self, random_model):
        """Test no reactions gives an empty matrix."""
        assert embed_reactions(random_model, []).shape == (0, 8)

    def test_too_many_components(self, small_encoder_config):
        """Test a side wider than max_components is rejected."""
        config = small_encoder_config.model_copy(update={"max_components": 2})
        rxn = parse_reaction("C.N.O>>CNO", "x")

        with pytest.raises(TooManyComponents):
            prepare_reaction(rxn, config)

    def test_sides_train_independently(self, random_model, sample_reactions):
        """Test one Adam step touches both encoders without coupling their names."""
        batch = [prepare_reaction(r, random_model.config) for r in sample_reactions[:3]]
        with Tape() as tape:
            params = random_model.tensors(requires_grad=True)
            _, logits = forward(params, random_model.config, batch)
            loss = ops.bce_with_logits(logits, np.array([1.0, 0.0, 1.0]))
        grads = backward(tape, loss, params)

        reactant_only = {k: v for k, v in grads.items() if k.startswith("reactant.")}
        new, _ = adam_step(random_model.parameters, reactant_only, AdamState())

        for name in random_model.side_parameter_names("product"):
            np.testing.assert_array_equal(new[name], random_model.parameters[name])
        moved = [
            name
            for name in random_model.side_parameter_names("reactant")
            if not np.array_equal(new[name], random_model.parameters[name])
        ]
        assert moved

    def test_full_model_gradients(self):
        """Test sampled entries of every parameter against central differences at step 1e-3."""
        config = EncoderConfig(
            gnn_hidden=4,
            gnn_layers=2,
            d_model=4,
            tf_layers=1,
            tf_heads=2,
            ffn_dim=6,
            emb_dim=4,
            activation=Activation.GELU,
        )
        model = ModelCheckpoint.init(config, seed=11, dtype=np.float64)
        reactions = [parse_reaction("CCO.C>>CCOC", "a"), parse_reaction("NCCBr.N>>NCCN", "b")]
        batch = [prepare_reaction(r, config, np.float64) for r in reactions]
        targets = np.array([1.0, 0.0])

        def loss(p):
            _, logits = forward(p, config, batch)
            return ops.bce_with_logits(logits, targets)

        errors = check_model_gradients(loss, model.parameters, step=1e-3, max_entries=4, seed=2)

        assert set(errors) == {n for n in model.parameters if not n.endswith(SHIFT_INVARIANT_SUFFIXES)}

    def test_reaction_logits_shape(self, random_model, sample_reactions):
        """Test one logit per reaction."""
        assert reaction_logits(random_model, sample_reactions).shape == (len(sample_reactions),)


class TestCheckpoint:
    """Test checkpoint save and load."""

    def test_round_trip_is_bit_exact(self, random_model, temp_dir):
        """Test saved parameters load back unchanged."""
        path = save_checkpoint(random_model, temp_dir / "model.ckpt")
        loaded = load_checkpoint(path)

        assert loaded.config == random_model.config
        assert loaded.rng_seed == random_model.rng_seed
        for name, value in random_model.parameters.items():
            np.testing.assert_array_equal(loaded.parameters[name], value)
        assert checkpoint_bytes(loaded) == path.read_bytes()

    def test_bad_magic(self, random_model):
        """Test a foreign file is rejected."""
        payload = checkpoint_bytes(random_model)

        with pytest.raises(CheckpointError):
            parse_checkpoint(b"NOTACKPT" + payload[8:])

    def test_truncated(self, random_model):
        """Test a cut-off blob is rejected."""
        payload = checkpoint_bytes(random_model)

        with pytest.raises(CheckpointError):
            parse_checkpoint(payload[:-40])

    def test_missing_file(self, temp_dir):
        """Test an absent path raises CheckpointError."""
        with pytest.raises(CheckpointError):
            load_checkpoint(temp_dir / "missing.ckpt")

    def test_wrong_shapes(self, small_encoder_config):
        """Test parameters that disagree with the config."""
        model = ModelCheckpoint.init(small_encoder_config)
        params = dict(model.parameters)
        params["classifier.bias"] = np.zeros(3, dtype=np.float32)

        with pytest.raises(CheckpointError):
            ModelCheckpoint(small_encoder_config, params)
