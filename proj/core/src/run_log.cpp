#include "blockout/run_log.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "io_util.hpp"

namespace blockout {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

constexpr char kLogHeader[] = "iteration,train_loss,train_acc,eval_acc";

std::string text_from(const std::vector<std::uint8_t>& bytes) {
    return std::string(bytes.begin(), bytes.end());
}

double parse_double(const std::string& field, std::size_t offset, const char* what) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE)
        throw ParseError(offset, std::string("bad ") + what + " value \"" + field + "\"");
    return v;
}

std::uint64_t parse_u64(const std::string& field, std::size_t offset, const char* what) {
    errno = 0;
    char* end = nullptr;
    const std::uint64_t v = std::strtoull(field.c_str(), &end, 10);
    if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE)
        throw ParseError(offset, std::string("bad ") + what + " value \"" + field + "\"");
    return v;
}

}  // namespace

void write_log_csv(const std::string& path, const TrainingLog& log) {
    std::string out = kLogHeader;
    out += '\n';
    std::size_t next_eval = 0;
    for (const IterationStat& stat : log.iterations) {
        out += std::to_string(stat.iteration);
        out += ',';
        out += format_double(stat.loss);
        out += ',';
        out += format_double(stat.accuracy);
        out += ',';
        if (next_eval < log.evals.size() && log.evals[next_eval].iteration == stat.iteration) {
            out += format_double(log.evals[next_eval].accuracy);
            ++next_eval;
        }
        out += '\n';
    }
    detail::write_file_bytes(path, std::vector<std::uint8_t>(out.begin(), out.end()));
}

TrainingLog read_log_csv(const std::string& path) {
    const std::string text = text_from(detail::read_file_bytes(path));
    TrainingLog log;
    std::size_t pos = 0;
    std::size_t line_start = 0;
    bool saw_header = false;
    while (pos <= text.size()) {
        if (pos == text.size() || text[pos] == '\n') {
            const std::string line = text.substr(line_start, pos - line_start);
            if (!line.empty()) {
                if (!saw_header) {
                    if (line != kLogHeader)
                        throw ParseError(line_start, "bad header \"" + line + "\"");
                    saw_header = true;
                } else {
                    std::vector<std::string> fields;
                    std::size_t field_start = 0;
                    for (std::size_t i = 0; i <= line.size(); ++i) {
                        if (i == line.size() || line[i] == ',') {
                            fields.push_back(line.substr(field_start, i - field_start));
                            field_start = i + 1;
                        }
                    }
                    if (fields.size() != 4)
                        throw ParseError(line_start, "expected 4 fields, got " +
                                                         std::to_string(fields.size()));
                    IterationStat stat{};
                    stat.iteration = parse_u64(fields[0], line_start, "iteration");
                    stat.loss = parse_double(fields[1], line_start, "train_loss");
                    stat.accuracy = parse_double(fields[2], line_start, "train_acc");
                    if (!log.iterations.empty() &&
                        stat.iteration <= log.iterations.back().iteration)
                        throw ParseError(line_start, "iteration column is not increasing");
                    log.iterations.push_back(stat);
                    if (!fields[3].empty())
                        log.evals.push_back(
                            {stat.iteration, parse_double(fields[3], line_start, "eval_acc")});
                }
            }
            line_start = pos + 1;
        }
        if (pos == text.size()) break;
        ++pos;
    }
    if (!saw_header) throw ParseError(0, "empty log file");
    return log;
}

void write_snapshots(const std::string& path, const std::vector<ProbabilitySnapshot>& snapshots) {
    detail::ByteWriter w;
    w.magic("BSNP");
    w.u16(1);
    w.u64(snapshots.size());
    for (const ProbabilitySnapshot& snap : snapshots) {
        w.u64(snap.iteration);
        w.u32(snap.interface_id);
        w.u32(static_cast<std::uint32_t>(snap.p.rows()));
        w.u32(static_cast<std::uint32_t>(snap.p.cols()));
        for (double v : snap.p.values()) w.f64(v);
    }
    detail::write_file_bytes(path, w.bytes());
}

std::vector<ProbabilitySnapshot> read_snapshots(const std::string& path) {
    detail::ByteReader r(detail::read_file_bytes(path));
    r.expect_magic("BSNP");
    const std::uint16_t version = r.u16("version");
    if (version != 1) r.fail("unsupported snapshot version " + std::to_string(version));
    const std::uint64_t count = r.u64("record count");
    std::vector<ProbabilitySnapshot> snapshots;
    snapshots.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t i = 0; i < count; ++i) {
        ProbabilitySnapshot snap;
        snap.iteration = r.u64("iteration");
        snap.interface_id = r.u32("interface id");
        const std::uint32_t rows = r.u32("rows");
        const std::uint32_t cols = r.u32("cols");
        if (rows == 0 || cols == 0 || static_cast<std::uint64_t>(rows) * cols > (1u << 26))
            r.fail("implausible snapshot shape " + std::to_string(rows) + "x" +
                   std::to_string(cols));
        snap.p = DenseMatrix(rows, cols);
        for (double& v : snap.p.values()) v = r.f64("probability");
        snapshots.push_back(std::move(snap));
    }
    r.expect_exhausted();
    return snapshots;
}

}  // namespace blockout
