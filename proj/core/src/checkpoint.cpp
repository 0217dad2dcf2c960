#include "blockout/checkpoint.hpp"

#include "io_util.hpp"

namespace blockout {

namespace {

constexpr std::uint16_t kVersion = 1;
constexpr std::uint64_t kMaxSide = 1u << 20;

void write_matrix(detail::ByteWriter& w, const DenseMatrix& m) {
    for (double v : m.values()) w.f64(v);
}

void read_matrix(detail::ByteReader& r, DenseMatrix& m, const char* what) {
    for (double& v : m.values()) v = r.f64(what);
}

std::uint32_t read_dim(detail::ByteReader& r, const char* what) {
    const std::uint32_t v = r.u32(what);
    if (v == 0 || v > kMaxSide)
        r.fail(std::string(what) + " " + std::to_string(v) + " outside [1, " +
               std::to_string(kMaxSide) + "]");
    return v;
}

}  // namespace

void save_checkpoint(const Network& net, const std::string& path) {
    if (!net.finalized()) throw StateError("save_checkpoint: network is not finalized");
    if (net.layer_count() > 65535)
        throw DomainError("save_checkpoint: too many layers for the format");
    detail::ByteWriter w;
    w.magic("BLKO");
    w.u16(kVersion);
    w.u16(static_cast<std::uint16_t>(net.layer_count()));
    for (std::size_t i = 0; i < net.layer_count(); ++i) {
        const Layer& layer = net.layer(i);
        w.u8(static_cast<std::uint8_t>(layer.kind()));
        switch (layer.kind()) {
            case LayerKind::dense: {
                const auto& dense = static_cast<const DenseLayer&>(layer);
                w.u32(static_cast<std::uint32_t>(dense.output_dim()));
                w.u32(static_cast<std::uint32_t>(dense.input_dim()));
                write_matrix(w, dense.weights());
                for (double v : dense.bias()) w.f64(v);
                break;
            }
            case LayerKind::blockout: {
                const auto& blk = static_cast<const BlockoutLayer&>(layer);
                w.u32(static_cast<std::uint32_t>(blk.output_dim()));
                w.u32(static_cast<std::uint32_t>(blk.input_dim()));
                w.u32(static_cast<std::uint32_t>(blk.clusters()));
                w.u8(blk.input_interface_shared() ? 1 : 0);
                write_matrix(w, blk.weights());
                for (double v : blk.bias()) w.f64(v);
                write_matrix(w, blk.output_interface()->logits());
                if (!blk.input_interface_shared()) write_matrix(w, blk.input_interface()->logits());
                break;
            }
            case LayerKind::relu:
                w.u32(static_cast<std::uint32_t>(layer.input_dim()));
                break;
            case LayerKind::softmax_loss:
                w.u32(static_cast<std::uint32_t>(layer.output_dim()));
                break;
        }
    }
    detail::write_file_bytes(path, w.bytes());
}

Network load_checkpoint(const std::string& path) {
    detail::ByteReader r(detail::read_file_bytes(path));
    r.expect_magic("BLKO");
    const std::uint16_t version = r.u16("version");
    if (version != kVersion) r.fail("unsupported checkpoint version " + std::to_string(version));
    const std::uint16_t layer_count = r.u16("layer count");
    if (layer_count == 0) r.fail("checkpoint has no layers");

    Network net;
    RngStream scratch(0);  // placeholder draws, overwritten from the file
    const BlockoutLayer* previous_blockout = nullptr;
    bool previous_blockout_adjacent = false;
    for (std::uint16_t i = 0; i < layer_count; ++i) {
        const std::uint8_t tag = r.u8("layer tag");
        switch (tag) {
            case static_cast<std::uint8_t>(LayerKind::dense): {
                const std::uint32_t d_out = read_dim(r, "dense output dim");
                const std::uint32_t d_in = read_dim(r, "dense input dim");
                net.add_dense(d_in, d_out, scratch);
                auto& dense = static_cast<DenseLayer&>(net.layer(net.layer_count() - 1));
                read_matrix(r, dense.weights(), "dense weights");
                for (double& v : dense.bias()) v = r.f64("dense bias");
                previous_blockout_adjacent = false;
                break;
            }
            case static_cast<std::uint8_t>(LayerKind::blockout): {
                const std::uint32_t d_out = read_dim(r, "blockout output dim");
                const std::uint32_t d_in = read_dim(r, "blockout input dim");
                const std::uint32_t k = read_dim(r, "blockout cluster count");
                const std::uint8_t shared = r.u8("blockout shared flag");
                if (shared > 1) r.fail("blockout shared flag must be 0 or 1");
                const bool expect_shared = previous_blockout_adjacent &&
                                           previous_blockout->output_dim() == d_in &&
                                           previous_blockout->clusters() == k;
                if ((shared == 1) != expect_shared)
                    r.fail("blockout shared flag does not match the layer sequence");
                try {
                    net.add_blockout(d_in, d_out, k, scratch);
                } catch (const DomainError& e) {
                    r.fail(e.what());
                } catch (const ShapeError& e) {
                    r.fail(e.what());
                }
                auto& blk = static_cast<BlockoutLayer&>(net.layer(net.layer_count() - 1));
                read_matrix(r, blk.weights(), "blockout weights");
                for (double& v : blk.bias()) v = r.f64("blockout bias");
                read_matrix(r, blk.output_interface()->logits(), "blockout output logits");
                if (!shared) read_matrix(r, blk.input_interface()->logits(), "blockout input logits");
                previous_blockout = &blk;
                previous_blockout_adjacent = true;
                break;
            }
            case static_cast<std::uint8_t>(LayerKind::relu): {
                const std::uint32_t width = read_dim(r, "relu width");
                if (net.layer_count() == 0 || net.layer(net.layer_count() - 1).output_dim() != width)
                    r.fail("relu width " + std::to_string(width) +
                           " does not match the preceding layer");
                net.add_relu();
                break;
            }
            case static_cast<std::uint8_t>(LayerKind::softmax_loss): {
                const std::uint32_t classes = read_dim(r, "softmax class count");
                net.add_softmax_loss(classes);
                previous_blockout_adjacent = false;
                break;
            }
            default:
                r.fail("unknown layer tag " + std::to_string(tag));
        }
    }
    r.expect_exhausted();
    try {
        net.finalize();
    } catch (const std::exception& e) {
        r.fail(std::string("inconsistent layer stack: ") + e.what());
    }
    return net;
}

}  // namespace blockout
