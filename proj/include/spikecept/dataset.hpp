#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spikecept/lif.hpp"

namespace spikecept {

// 28x28 grayscale images with digit labels, stored flat.
struct Dataset {
    std::vector<std::uint8_t> images; // count * 784 bytes
    std::vector<std::uint8_t> labels;
    std::string split = "train";

    std::size_t count() const { return labels.size(); }
    const std::uint8_t* image(std::size_t i) const {
        return images.data() + i * 784;
    }
    void validate() const {
        if (images.size() != labels.size() * 784)
            throw ConfigError("dataset: image/label count mismatch");
        for (auto l : labels)
            if (l > 9) throw ConfigError("dataset: label out of range 0..9");
    }
    Dataset head(std::size_t n) const {
        Dataset d;
        n = std::min(n, count());
        d.images.assign(images.begin(), images.begin() + n * 784);
        d.labels.assign(labels.begin(), labels.begin() + n);
        d.split = split;
        return d;
    }
};

} // namespace spikecept
