#include <sstream>

#include "cli.hpp"

namespace ael::cli {

std::string route_svg(const tsp::Instance& instance, std::span<const tsp::NodeId> order) {
    constexpr double size = 512.0, margin = 16.0;
    double min_x = 0, min_y = 0, max_x = 1, max_y = 1;
    if (instance.size() > 0) {
        min_x = max_x = instance.coords()[0].x;
        min_y = max_y = instance.coords()[0].y;
        for (const auto& p : instance.coords()) {
            min_x = std::min(min_x, p.x);
            max_x = std::max(max_x, p.x);
            min_y = std::min(min_y, p.y);
            max_y = std::max(max_y, p.y);
        }
    }
    const double span = std::max({max_x - min_x, max_y - min_y, 1e-12});
    const double scale = (size - 2 * margin) / span;
    auto px = [&](const tsp::Point& p) {
        std::ostringstream s;
        s << margin + (p.x - min_x) * scale << ',' << size - margin - (p.y - min_y) * scale;
        return s.str();
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
        << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<polygon fill=\"none\" stroke=\"#1f4e99\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < order.size(); ++k) {
        out << (k ? " " : "") << px(instance.coords()[order[k]]);
    }
    out << "\"/>\n";
    for (std::size_t i = 0; i < instance.size(); ++i) {
        const auto xy = px(instance.coords()[i]);
        const auto comma = xy.find(',');
        const bool start = !order.empty() && order.front() == i;
        out << "<circle cx=\"" << xy.substr(0, comma) << "\" cy=\"" << xy.substr(comma + 1) << "\" r=\""
            << (start ? 6 : 3) << "\" fill=\"" << (start ? "#d62728" : "black") << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace ael::cli
