#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "quarry/workload.hpp"

// Built-in layer tables, transcribed from the published architectures.
// ResNet variants list conv layers only (stem, residual convs, and the 1x1
// projection shortcuts at stage transitions); the 10/1000-way classifier FC
// is omitted because its MAC share is negligible for these models. VGG-16
// keeps its three FC layers, which carry a meaningful share of the compute.

namespace quarry {

namespace {

class NetBuilder {
public:
    explicit NetBuilder(std::string name) { net_.name = std::move(name); }

    void conv(const std::string& layer_name, std::uint64_t c, std::uint64_t m,
              std::uint64_t hw, std::uint64_t rs, std::uint64_t stride, std::uint64_t pad) {
        LayerConfig l;
        l.name = layer_name;
        l.kind = LayerKind::Conv;
        l.in_channels = c;
        l.out_channels = m;
        l.in_height = l.in_width = hw;
        l.filter_height = l.filter_width = rs;
        l.stride = stride;
        l.padding = pad;
        net_.layers.push_back(std::move(l));
    }

    void fc(const std::string& layer_name, std::uint64_t c, std::uint64_t m) {
        LayerConfig l;
        l.name = layer_name;
        l.kind = LayerKind::Fc;
        l.in_channels = c;
        l.out_channels = m;
        net_.layers.push_back(std::move(l));
    }

    Network take() { return std::move(net_); }

private:
    Network net_;
};

// CIFAR ResNet (6n+2 family): 3x3 stem at 32x32, three stages of n basic
// blocks at widths 16/32/64, strided first block and projection shortcut at
// each stage transition.
Network cifar_resnet(const std::string& name, std::uint64_t blocks_per_stage) {
    NetBuilder b(name);
    b.conv("conv1", 3, 16, 32, 3, 1, 1);

    const std::uint64_t widths[3] = {16, 32, 64};
    const std::uint64_t sizes[3] = {32, 16, 8};
    for (int stage = 0; stage < 3; ++stage) {
        std::uint64_t w = widths[stage];
        std::uint64_t in_w = stage == 0 ? 16 : widths[stage - 1];
        std::uint64_t sz = sizes[stage];
        for (std::uint64_t blk = 1; blk <= blocks_per_stage; ++blk) {
            std::ostringstream p;
            p << "s" << stage + 1 << "b" << blk;
            bool transition = stage > 0 && blk == 1;
            if (transition) {
                b.conv(p.str() + "c1", in_w, w, sz * 2, 3, 2, 1);
                b.conv(p.str() + "c2", w, w, sz, 3, 1, 1);
                b.conv(p.str() + "proj", in_w, w, sz * 2, 1, 2, 0);
            } else {
                b.conv(p.str() + "c1", w, w, sz, 3, 1, 1);
                b.conv(p.str() + "c2", w, w, sz, 3, 1, 1);
            }
        }
    }
    return b.take();
}

// VGG-16 conv stack: 13 3x3/s1/p1 convs in five blocks separated by 2x2
// pooling (pooling is not a compute layer; it only halves the spatial size).
void vgg16_convs(NetBuilder& b, std::uint64_t input_hw) {
    const std::uint64_t chans[5] = {64, 128, 256, 512, 512};
    const int convs_per_block[5] = {2, 2, 3, 3, 3};
    std::uint64_t hw = input_hw;
    std::uint64_t in_c = 3;
    for (int blk = 0; blk < 5; ++blk) {
        for (int i = 1; i <= convs_per_block[blk]; ++i) {
            std::ostringstream n;
            n << "conv" << blk + 1 << "_" << i;
            b.conv(n.str(), in_c, chans[blk], hw, 3, 1, 1);
            in_c = chans[blk];
        }
        hw /= 2;
    }
}

Network vgg16_cifar() {
    NetBuilder b("vgg16-cifar");
    vgg16_convs(b, 32);
    b.fc("fc1", 512, 512);
    b.fc("fc2", 512, 512);
    b.fc("fc3", 512, 10);
    return b.take();
}

Network vgg16_imagenet() {
    NetBuilder b("vgg16-imagenet");
    vgg16_convs(b, 224);
    b.fc("fc1", 512 * 7 * 7, 4096);
    b.fc("fc2", 4096, 4096);
    b.fc("fc3", 4096, 1000);
    return b.take();
}

Network resnet34() {
    NetBuilder b("resnet34");
    b.conv("conv1", 3, 64, 224, 7, 2, 3);  // 3x3/s2 max-pool follows: stages start at 56

    const std::uint64_t widths[4] = {64, 128, 256, 512};
    const std::uint64_t sizes[4] = {56, 28, 14, 7};
    const std::uint64_t blocks[4] = {3, 4, 6, 3};
    for (int stage = 0; stage < 4; ++stage) {
        std::uint64_t w = widths[stage];
        std::uint64_t in_w = stage == 0 ? 64 : widths[stage - 1];
        std::uint64_t sz = sizes[stage];
        for (std::uint64_t blk = 1; blk <= blocks[stage]; ++blk) {
            std::ostringstream p;
            p << "s" << stage + 1 << "b" << blk;
            bool transition = stage > 0 && blk == 1;
            if (transition) {
                b.conv(p.str() + "c1", in_w, w, sz * 2, 3, 2, 1);
                b.conv(p.str() + "c2", w, w, sz, 3, 1, 1);
                b.conv(p.str() + "proj", in_w, w, sz * 2, 1, 2, 0);
            } else {
                b.conv(p.str() + "c1", w, w, sz, 3, 1, 1);
                b.conv(p.str() + "c2", w, w, sz, 3, 1, 1);
            }
        }
    }
    return b.take();
}

Network resnet50() {
    NetBuilder b("resnet50");
    b.conv("conv1", 3, 64, 224, 7, 2, 3);

    const std::uint64_t mid[4] = {64, 128, 256, 512};  // bottleneck width; output is 4x
    const std::uint64_t sizes[4] = {56, 28, 14, 7};
    const std::uint64_t blocks[4] = {3, 4, 6, 3};
    std::uint64_t in_c = 64;
    for (int stage = 0; stage < 4; ++stage) {
        std::uint64_t w = mid[stage];
        std::uint64_t out_c = w * 4;
        std::uint64_t sz = sizes[stage];
        for (std::uint64_t blk = 1; blk <= blocks[stage]; ++blk) {
            std::ostringstream p;
            p << "s" << stage + 1 << "b" << blk;
            bool strided = stage > 0 && blk == 1;  // stride carried by the 3x3
            std::uint64_t in_sz = strided ? sz * 2 : sz;
            b.conv(p.str() + "c1", in_c, w, in_sz, 1, 1, 0);
            b.conv(p.str() + "c2", w, w, in_sz, 3, strided ? 2 : 1, 1);
            b.conv(p.str() + "c3", w, out_c, sz, 1, 1, 0);
            if (blk == 1) b.conv(p.str() + "proj", in_c, out_c, in_sz, 1, strided ? 2 : 1, 0);
            in_c = out_c;
        }
    }
    return b.take();
}

const std::map<std::string, std::function<Network()>>& preset_table() {
    static const std::map<std::string, std::function<Network()>> table = {
        {"vgg16-cifar", vgg16_cifar},
        {"resnet20", [] { return cifar_resnet("resnet20", 3); }},
        {"resnet56", [] { return cifar_resnet("resnet56", 9); }},
        {"vgg16-imagenet", vgg16_imagenet},
        {"resnet34", resnet34},
        {"resnet50", resnet50},
    };
    return table;
}

}  // namespace

Network builtin_network(const std::string& preset) {
    auto it = preset_table().find(preset);
    if (it == preset_table().end()) {
        std::ostringstream oss;
        oss << "unknown network preset '" << preset << "' (known:";
        for (const auto& name : builtin_network_names()) oss << " " << name;
        oss << ")";
        throw std::runtime_error(oss.str());
    }
    return it->second();
}

const std::vector<std::string>& builtin_network_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, _] : preset_table()) v.push_back(name);
        return v;
    }();
    return names;
}

bool is_builtin_network(const std::string& name) {
    return preset_table().contains(name);
}

}  // namespace quarry
