#include "obslab/cli/plots.hpp"

#include <sstream>

namespace obslab::cli {

namespace {

std::string png_name(std::string_view csv_name) {
    std::string out(csv_name);
    if (const auto dot = out.rfind('.'); dot != std::string::npos) out.erase(dot);
    return out + ".png";
}

void preamble(std::ostream& os, std::string_view png, int rows) {
    os << "# gnuplot script; run with: gnuplot <this file>\n"
       << "set datafile separator ','\n"
       << "set datafile commentschars '#'\n"
       << "set terminal pngcairo size 900," << 260 * rows << "\n"
       << "set output '" << png << "'\n"
       << "set grid\n"
       << "set xlabel 't [s]'\n"
       << "set multiplot layout " << rows << ",1\n";
}

}  // namespace

std::string trace_plot_script(const SimTrace& trace, std::string_view csv_name, std::string_view title) {
    const bool velocity = trace.has("xhat2");
    std::ostringstream os;
    preamble(os, png_name(csv_name), velocity ? 5 : 4);
    const std::string f = "'" + std::string(csv_name) + "'";
    os << "set title 'position tracking (" << title << ")'\n"
       << "plot " << f << " using 't':'x1' with lines title 'x_1', " << f
       << " using 't':'yd0' with lines dashtype 2 title 'y_d'\n"
       << "set title 'tracking error'\n"
       << "plot " << f << " using 't':'e1' with lines title 'e_1'\n"
       << "set title 'uncertainty approximation'\n"
       << "plot " << f << " using 't':'f' with lines title 'f', " << f
       << " using 't':'fhat' with lines title 'f estimate'\n"
       << "set title 'control'\n"
       << "plot " << f << " using 't':'u' with lines title 'u'\n";
    if (velocity) {
        os << "set title 'velocity estimate'\n"
           << "plot " << f << " using 't':'x2' with lines title 'x_2', " << f
           << " using 't':'xhat2' with lines title 'x_2 estimate'\n";
    }
    os << "unset multiplot\n";
    return os.str();
}

std::string compare_plot_script(const std::vector<std::pair<std::string, std::string>>& runs) {
    std::ostringstream os;
    preamble(os, "compare.png", 2);
    auto overlay = [&](std::string_view title, std::string_view expr) {
        os << "set title '" << title << "'\nplot ";
        for (std::size_t i = 0; i < runs.size(); ++i) {
            os << (i ? ", \\\n     " : "") << "'" << runs[i].second << "' using 't':" << expr << " with lines title '"
               << runs[i].first << "'";
        }
        os << '\n';
    };
    overlay("tracking error e_1", "'e1'");
    overlay("uncertainty estimate error", "(column('fhat') - column('f'))");
    os << "unset multiplot\n";
    return os.str();
}

std::string freqresp_plot_script(std::string_view csv_name, std::size_t channel) {
    std::ostringstream os;
    preamble(os, png_name(csv_name), 2);
    const std::string f = "'" + std::string(csv_name) + "'";
    os << "set xlabel 'omega [rad/s]'\n"
       << "set logscale x\n"
       << "set title 'channel " << channel << " magnitude'\n"
       << "set logscale y\n"
       << "plot " << f << " using 'omega':'mag_ic' with lines title 'integral chain', " << f
       << " using 'omega':'mag_hg' with lines title 'classical high gain'\n"
       << "unset logscale y\n"
       << "set title 'channel " << channel << " phase [rad]'\n"
       << "plot " << f << " using 'omega':'phase_ic' with lines title 'integral chain', " << f
       << " using 'omega':'phase_hg' with lines title 'classical high gain'\n"
       << "unset multiplot\n";
    return os.str();
}

}  // namespace obslab::cli
