#include "fraudlab/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "fraudlab/error.hpp"
#include "fraudlab/rng.hpp"
#include "fraudlab/svg.hpp"

namespace fraudlab {

namespace fs = std::filesystem;
using nlohmann::json;

ReportFormat format_from_name(const std::string& name) {
    if (name == "json") return ReportFormat::json;
    if (name == "csv") return ReportFormat::csv;
    if (name == "markdown" || name == "md") return ReportFormat::markdown;
    if (name == "svg") return ReportFormat::svg;
    throw ValidationError("unknown format '" + name + "' (expected json|csv|markdown|svg)");
}

std::set<ReportFormat> formats_from_list(const std::string& comma_list) {
    std::set<ReportFormat> out;
    std::istringstream in(comma_list);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.insert(format_from_name(item));
    return out;
}

namespace {

std::string four(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

json class_report_json(const ClassReport& r) {
    return {{"positive_class", r.positive_class}, {"precision", r.precision}, {"recall", r.recall},
            {"f1", r.f1},           {"accuracy", r.accuracy},   {"support", r.support},
            {"degenerate", r.degenerate}};
}

} // namespace

std::string report_to_json(const EvalReport& report) {
    json doc;
    doc["class1"] = class_report_json(report.class1);
    doc["class0"] = class_report_json(report.class0);
    doc["confusion"] = {{"tp", report.cm.tp}, {"tn", report.cm.tn}, {"fp", report.cm.fp}, {"fn", report.cm.fn}};
    doc["threshold"] = report.threshold;
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(report.data.content_hash));
    doc["data"] = {{"rows", report.data.rows}, {"fraud", report.data.fraud}, {"content_hash", hash}};
    doc["model"] = report.model_desc;
    doc["sampling"] = report.sampling_desc;
    doc["model_seed"] = report.model_seed;
    return doc.dump(2) + "\n";
}

std::string report_to_csv(const std::string& model, const EvalReport& report) {
    std::ostringstream out;
    out << "model,class,precision,recall,f1,accuracy,support,tp,fp,fn,tn,threshold\n";
    const auto line = [&](const ClassReport& r) {
        out << model << ',' << r.positive_class << ',' << r.precision << ',' << r.recall << ',' << r.f1
            << ',' << r.accuracy << ',' << r.support << ',' << report.cm.tp << ',' << report.cm.fp
            << ',' << report.cm.fn << ',' << report.cm.tn << ',' << report.threshold << '\n';
    };
    line(report.class1);
    line(report.class0);
    return out.str();
}

std::string report_to_markdown(const std::string& model, const std::string& tag,
                               const EvalReport& report) {
    std::ostringstream out;
    out << "## " << model << " (" << tag << ")\n\n";
    out << "| Model | Precision | Recall | F1-Score | Accuracy |\n";
    out << "|-------|-----------|--------|----------|----------|\n";
    out << "| " << model << " | " << four(report.class1.precision) << " | " << four(report.class1.recall)
        << " | " << four(report.class1.f1) << " | " << four(report.class1.accuracy) << " |\n\n";
    out << "- class 0: precision " << four(report.class0.precision) << ", recall "
        << four(report.class0.recall) << ", f1 " << four(report.class0.f1) << "\n";
    out << "- confusion (class 1 positive): tp=" << report.cm.tp << " fp=" << report.cm.fp
        << " fn=" << report.cm.fn << " tn=" << report.cm.tn << "\n";
    out << "- threshold: " << report.threshold << "\n";
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(report.data.content_hash));
    out << "- data: rows=" << report.data.rows << " fraud=" << report.data.fraud << " hash=" << hash
        << "\n";
    out << "- model: " << report.model_desc << "\n";
    out << "- sampling: " << report.sampling_desc << "\n";
    return out.str();
}

void ensure_writable_dir(const std::string& dir) {
    if (dir.empty()) throw ValidationError("output directory not set");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
    const fs::path probe = fs::path(dir) / ".write_probe";
    std::ofstream test(probe, std::ios::binary);
    if (!test) throw Error("output directory '" + dir + "' is not writable");
    test.close();
    fs::remove(probe, ec);
}

namespace {

struct Emitter {
    const std::string& out_dir;
    std::vector<std::pair<std::string, std::uint64_t>> artifacts; // (relative path, hash)

    void write(const std::string& relative, const std::string& content) {
        const fs::path full = fs::path(out_dir) / relative;
        fs::create_directories(full.parent_path());
        std::ofstream out(full, std::ios::binary);
        if (!out) throw Error("cannot write file: " + full.string());
        out << content;
        if (!out) throw Error("write failed: " + full.string());
        artifacts.emplace_back(relative, fnv1a(content));
    }
};

std::string summary_markdown(const ExperimentResult& result, const std::string& tag) {
    std::ostringstream out;
    out << "# " << result.experiment << " — class 1 metrics (" << tag << ")\n\n";
    out << "| Model | Precision | Recall | F1-Score | Accuracy |\n";
    out << "|-------|-----------|--------|----------|----------|\n";
    for (const auto& r : result.reports) {
        if (r.eval_tag != tag) continue;
        out << "| " << r.model << " | " << four(r.report.class1.precision) << " | "
            << four(r.report.class1.recall) << " | " << four(r.report.class1.f1) << " | "
            << four(r.report.class1.accuracy) << " |\n";
    }
    return out.str();
}

std::string comparison_markdown(const ExperimentResult& result) {
    std::ostringstream out;
    out << "# baseline vs hybrid — class 1 metrics on the original test set\n\n";
    out << "| Model | Precision (base) | Precision (hybrid) | Recall (base) | Recall (hybrid) "
           "| F1 (base) | F1 (hybrid) | Selected ratio |\n";
    out << "|-------|------|------|------|------|------|------|------|\n";
    for (const auto& ms : result.sweeps) {
        const EvalReport* base = result.find(ms.model, "baseline");
        const EvalReport* hyb = result.find(ms.model, "hybrid");
        if (!base || !hyb) continue;
        char ratio[32];
        std::snprintf(ratio, sizeof ratio, "%.4g", ms.selected_ratio);
        out << "| " << ms.model << " | " << four(base->class1.precision) << " | "
            << four(hyb->class1.precision) << " | " << four(base->class1.recall) << " | "
            << four(hyb->class1.recall) << " | " << four(base->class1.f1) << " | "
            << four(hyb->class1.f1) << " | " << ratio << " |\n";
    }
    return out.str();
}

std::string sweep_csv_text(const RatioSweepResult& sweep) {
    std::ostringstream out;
    out << "ratio,precision,recall,f1,skipped_reason\n";
    char buf[40];
    for (const auto& p : sweep.points) {
        std::snprintf(buf, sizeof buf, "%.10g", p.ratio);
        out << buf;
        if (p.skipped) {
            std::string reason = p.skip_reason;
            for (auto& c : reason)
                if (c == ',' || c == '\n') c = ';';
            out << ",,,," << reason << '\n';
        } else {
            out << ',' << p.precision << ',' << p.recall << ',' << p.f1 << ",\n";
        }
    }
    return out.str();
}

std::string sweep_svg_text(const std::string& model, const RatioSweepResult& sweep) {
    SvgSeries precision{"precision", {}}, recall{"recall", {}}, f1{"f1", {}};
    for (const auto& p : sweep.points) {
        if (p.skipped) continue;
        precision.points.emplace_back(p.ratio, p.precision);
        recall.points.emplace_back(p.ratio, p.recall);
        f1.points.emplace_back(p.ratio, p.f1);
    }
    return render_line_chart("precision / recall vs training fraud ratio — " + model,
                             "training fraud ratio", "metric on evaluation set",
                             {precision, recall, f1});
}

} // namespace

EmittedFiles emit_reports(const ExperimentResult& result, const std::set<ReportFormat>& formats,
                          const std::string& out_dir) {
    ensure_writable_dir(out_dir);
    Emitter emit{out_dir, {}};

    const std::string base = "reports/" + result.experiment + "/";
    for (const auto& r : result.reports) {
        const std::string stem = base + r.model + "-" + r.eval_tag;
        if (formats.count(ReportFormat::json)) emit.write(stem + ".json", report_to_json(r.report));
        if (formats.count(ReportFormat::csv)) emit.write(stem + ".csv", report_to_csv(r.model, r.report));
        if (formats.count(ReportFormat::markdown))
            emit.write(stem + ".md", report_to_markdown(r.model, r.eval_tag, r.report));
    }

    if (formats.count(ReportFormat::markdown)) {
        std::map<std::string, bool> tags;
        for (const auto& r : result.reports) tags[r.eval_tag] = true;
        for (const auto& [tag, _] : tags)
            emit.write(base + "summary-" + tag + ".md", summary_markdown(result, tag));
        if (!result.sweeps.empty()) emit.write(base + "comparison.md", comparison_markdown(result));
    }

    for (const auto& ms : result.sweeps) {
        if (formats.count(ReportFormat::csv))
            emit.write("sweeps/" + ms.model + ".csv", sweep_csv_text(ms.sweep));
        if (formats.count(ReportFormat::svg))
            emit.write("sweeps/" + ms.model + ".svg", sweep_svg_text(ms.model, ms.sweep));
    }

    json manifest;
    manifest["experiment"] = result.experiment;
    manifest["config"] = result.config_snapshot;
    json artifacts = json::array();
    char hash[24];
    for (const auto& [path, h] : emit.artifacts) {
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(h));
        artifacts.push_back({{"path", path}, {"hash", hash}});
    }
    manifest["artifacts"] = artifacts;

    const std::string manifest_text = manifest.dump(2) + "\n";
    const fs::path manifest_path = fs::path(out_dir) / "manifest.json";
    std::ofstream out(manifest_path, std::ios::binary);
    if (!out) throw Error("cannot write manifest: " + manifest_path.string());
    out << manifest_text;
    out.close();

    EmittedFiles files;
    for (const auto& [path, _] : emit.artifacts) files.paths.push_back(path);
    files.manifest_path = manifest_path.string();
    return files;
}

} // namespace fraudlab
