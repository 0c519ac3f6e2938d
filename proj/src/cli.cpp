#include "vesseltop/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "vesseltop/betti.hpp"
#include "vesseltop/format.hpp"
#include "vesseltop/metrics.hpp"
#include "vesseltop/phantoms.hpp"
#include "vesseltop/report.hpp"
#include "vesseltop/softloss.hpp"
#include "vesseltop/vgrid.hpp"

namespace vesseltop {

namespace {

using nlohmann::ordered_json;

/// Bad flag values detected after parsing.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, const std::string& seps) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (seps.find(c) != std::string::npos) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

std::pair<std::string, std::vector<int>> parse_group(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
        throw UsageError("--groups expects name:ids, got \"" + text + "\"");
    }
    std::vector<int> ids;
    for (const auto& part : split(text.substr(colon + 1), ",+")) {
        std::size_t used = 0;
        int id = 0;
        try {
            id = std::stoi(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != part.size()) throw UsageError("bad class id \"" + part + "\" in --groups");
        ids.push_back(id);
    }
    return {text.substr(0, colon), ids};
}

void check_variants(const std::vector<std::string>& variants) {
    if (variants.empty()) throw UsageError("at least one variant is required");
    for (const auto& v : variants) {
        if (!is_variant_name(v)) throw UsageError("unknown variant \"" + v + "\"");
    }
}

/// Writes `text` to `path`, or to `out` when no path was given.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw VgridError(VgridError::Kind::io, "cannot open " + path + " for writing");
    f << text;
    if (!f) throw VgridError(VgridError::Kind::io, "failed writing " + path);
}

// metrics -----------------------------------------------------------------

struct MetricsArgs {
    std::string pred, ref, out, format = "json";
    std::vector<std::string> variants = {"clDice", "cbDice"};
    double tol = 1.0;
    std::vector<std::string> groups;
    int classes = 0;
};

int cmd_metrics(const MetricsArgs& a, std::ostream& out) {
    check_variants(a.variants);
    if (!(a.tol > 0.0)) throw UsageError("--tol must be positive");
    EvaluateOptions opts;
    opts.variants = a.variants;
    opts.tolerance = a.tol;
    for (const auto& g : a.groups) opts.groups.push_back(parse_group(g));

    LabelGrid pred = read_labels(a.pred);
    LabelGrid ref = read_labels(a.ref);
    const int classes = a.classes > 0 ? a.classes : std::max(pred.class_count(), ref.class_count());
    pred = pred.with_class_count(classes);
    ref = ref.with_class_count(classes);
    const MetricReport report = evaluate(pred, ref, opts);

    std::ostringstream text;
    if (a.format == "csv") {
        write_report_csv(text, report);
    } else {
        text << report_to_json(report).dump(2) << '\n';
    }
    emit(text.str(), a.out, out);
    return exit_ok;
}

// phantom -----------------------------------------------------------------

struct PhantomArgs {
    std::string kind = "tube", out;
    std::vector<int> dims = {64, 48};
    std::vector<double> radii = {3.0}, lengths = {20.0}, orientation;
    double jitter = 0.0;
    std::uint64_t seed = 0;
    int margin = 2;
};

int cmd_phantom(const PhantomArgs& a, std::ostream& out) {
    PhantomSpec spec;
    spec.kind = parse_phantom_kind(a.kind);
    spec.dims = a.dims;
    spec.radii = a.radii;
    spec.lengths = a.lengths;
    if (!a.orientation.empty()) spec.orientation = a.orientation;
    spec.jitter = a.jitter;
    spec.seed = a.seed;
    spec.margin = a.margin;
    const BinaryField mask = generate(spec);
    write_vgrid(std::filesystem::path(a.out), mask);

    const BettiNumbers b = betti_numbers(mask);
    ordered_json j;
    j["schema"] = kReportSchema;
    j["kind"] = a.kind;
    j["dims"] = mask.shape().dims();
    j["foreground"] = mask.count();
    j["betti"] = {b.b0, b.b1, b.b2};
    j["out"] = a.out;
    out << j.dump(2) << '\n';
    return exit_ok;
}

// experiment --------------------------------------------------------------

struct ExperimentArgs {
    std::string name, out;
    std::vector<std::string> variants = {"clDice", "cl-M-D", "cbDice"};
};

int cmd_experiment(const ExperimentArgs& a, std::ostream& out) {
    check_variants(a.variants);
    const Experiment e = parse_experiment(a.name);
    std::ostringstream text;
    write_sweep_csv(text, sweep(e, a.variants));
    emit(text.str(), a.out, out);
    return exit_ok;
}

// gradcheck ---------------------------------------------------------------

struct GradArgs {
    std::string loss = "cbDice";
    std::optional<double> alpha, beta;
    double eps = 1e-4;
    std::uint64_t seed = 0;
    std::vector<int> dims = {8, 8};
    int instances = 1;
    std::optional<int> iters;
};

int cmd_gradcheck(const GradArgs& a, std::ostream& out) {
    const bool is_variant = is_variant_name(a.loss);
    if (!is_variant && a.loss != "dice" && a.loss != "ce") {
        throw UsageError("--loss must be dice, ce or a centerline variant, got \"" + a.loss + "\"");
    }
    if (!(a.eps > 0.0)) throw UsageError("--eps must be positive");
    if (a.instances < 1) throw UsageError("--instances must be positive");
    if (a.iters && *a.iters < 1) throw UsageError("--iters must be positive");
    const bool combined = a.alpha.has_value() || a.beta.has_value();
    CombinedLossSpec cspec;
    if (combined) {
        cspec.alpha = a.alpha.value_or(1.0);
        cspec.beta = a.beta.value_or(is_variant ? 1.0 : 0.0);
        cspec.variant = is_variant ? a.loss : "none";
        cspec.soft_skel_iters = a.iters;
        if (cspec.alpha < 0.0 || cspec.beta < 0.0) throw UsageError("--alpha and --beta must be nonnegative");
        if (!is_variant && cspec.beta != 0.0) throw UsageError("--beta needs a centerline variant as --loss");
    }
    GridShape shape;
    try {
        shape = GridShape(a.dims);
    } catch (const GridError& e) {
        throw UsageError(std::string("--dims: ") + e.what());
    }

    double worst = 0.0;
    int worst_instance = 0;
    std::size_t sites = 0;
    for (int k = 0; k < a.instances; ++k) {
        const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(k);
        const ProbField p = random_probe_field(shape, seed);
        const BinaryField ref = random_mask(shape, seed);
        LossFunction fn;
        if (combined) {
            fn = [&](const ProbField& q) { return combined_loss_grad(cspec, q, ref); };
        } else if (a.loss == "dice") {
            fn = [&](const ProbField& q) { return soft_dice_loss_grad(q, ref); };
        } else if (a.loss == "ce") {
            fn = [&](const ProbField& q) { return cross_entropy_grad(q, ref); };
        } else {
            const VariantSpec vs = VariantSpec::make(a.loss, shape.rank());
            const SkeletonBundle rb = build_bundle(ref);
            const int iters = a.iters.value_or(default_soft_skel_iters(rb));
            fn = [&, vs, rb, iters](const ProbField& q) { return soft_cl_x_loss_grad(vs, q, ref, rb, iters); };
        }
        const GradCheckResult r = grad_check(fn, p, a.eps);
        sites += r.sites;
        if (r.max_rel_error > worst) {
            worst = r.max_rel_error;
            worst_instance = k;
        }
    }

    ordered_json j;
    j["schema"] = kReportSchema;
    j["loss"] = a.loss;
    j["mode"] = combined ? "combined" : "single";
    if (combined) {
        j["alpha"] = round6(cspec.alpha);
        j["beta"] = round6(cspec.beta);
    }
    j["dims"] = shape.dims();
    j["eps"] = round6(a.eps);
    j["seed"] = a.seed;
    j["instances"] = a.instances;
    j["sites"] = sites;
    j["max_rel_error"] = round6(worst);
    j["worst_instance"] = worst_instance;
    j["within_1e-3"] = worst < 1e-3;
    out << j.dump(2) << '\n';
    return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Centerline and boundary aware segmentation metrics"};
    app.name(args.empty() ? "vesseltop" : args[0]);
    app.require_subcommand(1);

    MetricsArgs ma;
    auto* metrics = app.add_subcommand("metrics", "Per-class metric report for a prediction/reference pair");
    metrics->add_option("--pred", ma.pred, "Prediction labels (VGRID or PGM)")->required();
    metrics->add_option("--ref", ma.ref, "Reference labels (VGRID or PGM)")->required();
    metrics->add_option("--variants", ma.variants, "Centerline variants, comma separated")->delimiter(',');
    metrics->add_option("--tol", ma.tol, "NSD tolerance in physical units");
    metrics->add_option("--groups", ma.groups, "Class group name:id,id (repeatable)");
    metrics->add_option("--classes", ma.classes, "Declared class count including background");
    metrics->add_option("--out", ma.out, "Output file (default stdout)");
    metrics->add_option("--format", ma.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    PhantomArgs pa;
    auto* phantom = app.add_subcommand("phantom", "Write a synthetic vessel mask as VGRID");
    phantom->add_option("--kind", pa.kind, "tube, ybranch, ring or multi_tube");
    phantom->add_option("--dims", pa.dims, "Grid extent, e.g. 64,48 or 64,64,16")->delimiter(',');
    phantom->add_option("--radius,--radii", pa.radii, "Radii, comma separated")->delimiter(',');
    phantom->add_option("--length,--lengths", pa.lengths, "Centreline lengths")->delimiter(',');
    phantom->add_option("--orientation", pa.orientation, "Axis direction of tubes")->delimiter(',');
    phantom->add_option("--jitter", pa.jitter, "Endpoint jitter in voxels");
    phantom->add_option("--seed", pa.seed, "Jitter seed");
    phantom->add_option("--margin", pa.margin, "Required background margin");
    phantom->add_option("--out", pa.out, "Output VGRID path")->required();

    ExperimentArgs ea;
    auto* experiment = app.add_subcommand("experiment", "Run a phantom sensitivity sweep and print CSV");
    experiment->add_option("--name", ea.name, "translation, scaling or imbalance")->required();
    experiment->add_option("--variants", ea.variants, "Centerline variants")->delimiter(',');
    experiment->add_option("--out", ea.out, "Output CSV (default stdout)");

    GradArgs ga;
    auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the soft losses");
    gradcheck->add_option("--loss", ga.loss, "dice, ce or a centerline variant");
    gradcheck->add_option("--alpha", ga.alpha, "Dice weight; enables the combined loss");
    gradcheck->add_option("--beta", ga.beta, "Centerline weight; enables the combined loss");
    gradcheck->add_option("--eps", ga.eps, "Central difference step");
    gradcheck->add_option("--seed", ga.seed, "Instance seed");
    gradcheck->add_option("--dims", ga.dims, "Instance grid extent")->delimiter(',');
    gradcheck->add_option("--instances", ga.instances, "Number of random instances");
    gradcheck->add_option("--iters", ga.iters, "Soft skeleton iterations");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    if (argv.empty()) argv.push_back("vesseltop");
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_validation;
    }

    try {
        if (metrics->parsed()) return cmd_metrics(ma, out);
        if (phantom->parsed()) return cmd_phantom(pa, out);
        if (experiment->parsed()) return cmd_experiment(ea, out);
        if (gradcheck->parsed()) return cmd_gradcheck(ga, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const VgridError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const GridError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const MetricError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const PhantomError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return exit_internal;
    }
    return exit_internal;
}

}  // namespace vesseltop
