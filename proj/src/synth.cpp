#include "spikecept/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spikecept/rng.hpp"

namespace spikecept {

namespace {

struct Pt {
    double x, y;
};

// Sample an arc of an ellipse centred at (cx, cy), angles in turns.
void arc(std::vector<Pt>& out, double cx, double cy, double rx, double ry,
         double a0, double a1, int n = 40) {
    for (int i = 0; i <= n; ++i) {
        const double a = 2.0 * std::numbers::pi * (a0 + (a1 - a0) * i / n);
        out.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
    }
}

void line(std::vector<Pt>& out, double x0, double y0, double x1, double y1,
          int n = 30) {
    for (int i = 0; i <= n; ++i) {
        const double t = double(i) / n;
        out.push_back({x0 + (x1 - x0) * t, y0 + (y1 - y0) * t});
    }
}

// Stroke templates in a unit box, y growing downward.
std::vector<Pt> digit_strokes(std::uint8_t d) {
    std::vector<Pt> p;
    switch (d) {
    case 0:
        arc(p, 0.5, 0.5, 0.32, 0.42, 0.0, 1.0, 80);
        break;
    case 1:
        line(p, 0.38, 0.22, 0.52, 0.1);
        line(p, 0.52, 0.1, 0.52, 0.9);
        break;
    case 2:
        arc(p, 0.5, 0.28, 0.28, 0.2, 0.55, 1.05, 50);
        line(p, 0.74, 0.42, 0.24, 0.88);
        line(p, 0.24, 0.88, 0.8, 0.88);
        break;
    case 3:
        arc(p, 0.46, 0.28, 0.26, 0.2, 0.6, 1.22, 50);
        arc(p, 0.46, 0.7, 0.28, 0.22, 0.78, 1.4, 50);
        break;
    case 4:
        line(p, 0.62, 0.1, 0.22, 0.62);
        line(p, 0.22, 0.62, 0.82, 0.62);
        line(p, 0.62, 0.1, 0.62, 0.9);
        break;
    case 5:
        line(p, 0.76, 0.12, 0.3, 0.12);
        line(p, 0.3, 0.12, 0.28, 0.46);
        arc(p, 0.48, 0.66, 0.26, 0.22, 0.62, 1.38, 60);
        break;
    case 6:
        arc(p, 0.56, 0.3, 0.3, 0.36, 0.3, 0.62, 40);
        arc(p, 0.48, 0.68, 0.24, 0.22, 0.0, 1.0, 60);
        break;
    case 7:
        line(p, 0.2, 0.12, 0.8, 0.12);
        line(p, 0.8, 0.12, 0.42, 0.9);
        break;
    case 8:
        arc(p, 0.5, 0.3, 0.22, 0.19, 0.0, 1.0, 50);
        arc(p, 0.5, 0.7, 0.27, 0.22, 0.0, 1.0, 60);
        break;
    default: // 9
        arc(p, 0.5, 0.32, 0.25, 0.22, 0.0, 1.0, 55);
        line(p, 0.75, 0.34, 0.66, 0.9);
        break;
    }
    return p;
}

} // namespace

Dataset synth_digits(std::size_t count, std::uint64_t seed,
                     const std::string& split) {
    Dataset out;
    out.split = split;
    out.images.resize(count * 784, 0);
    out.labels.resize(count);

    const std::uint64_t split_tag = split == "train" ? 0x7261u : 0x7e57u;
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(mix_seed(seed, 0x5d16u, split_tag, i));
        const std::uint8_t label = static_cast<std::uint8_t>(i % 10);
        out.labels[i] = label;

        // per-sample affine jitter around the box centre
        const double rot = rng.uniform(-0.18, 0.18); // radians
        const double scale = rng.uniform(0.85, 1.1);
        const double dx = rng.uniform(-0.07, 0.07);
        const double dy = rng.uniform(-0.07, 0.07);
        const double shear = rng.uniform(-0.12, 0.12);
        const double cr = std::cos(rot), sr = std::sin(rot);

        std::vector<double> canvas(784, 0.0);
        const double pen = rng.uniform(0.85, 1.25); // pixels
        for (const Pt& q : digit_strokes(label)) {
            double x = (q.x - 0.5) * scale, y = (q.y - 0.5) * scale;
            x += shear * y;
            const double xr = cr * x - sr * y, yr = sr * x + cr * y;
            const double px = (xr + 0.5 + dx) * 24.0 + 2.0;
            const double py = (yr + 0.5 + dy) * 24.0 + 2.0;
            const int x0 = std::max(0, int(px - 2)), x1 = std::min(27, int(px + 2));
            const int y0 = std::max(0, int(py - 2)), y1 = std::min(27, int(py + 2));
            for (int yy = y0; yy <= y1; ++yy)
                for (int xx = x0; xx <= x1; ++xx) {
                    const double d2 = (xx - px) * (xx - px) + (yy - py) * (yy - py);
                    canvas[yy * 28 + xx] += std::exp(-d2 / (pen * pen));
                }
        }
        double peak = 0.0;
        for (double v : canvas) peak = std::max(peak, v);
        if (peak <= 0.0) peak = 1.0;
        for (std::size_t j = 0; j < 784; ++j) {
            double v = 255.0 * std::min(1.0, canvas[j] / (0.6 * peak));
            if (rng.next_double() < 0.01) v = std::min(255.0, v + rng.uniform(30.0, 120.0));
            out.images[i * 784 + j] = static_cast<std::uint8_t>(v + 0.5);
        }
    }
    return out;
}

} // namespace spikecept
