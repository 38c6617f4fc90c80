// pats: saliency maps, benchmark scoring, the selection service and grasp geometry.

#include <pats/dataset.hpp>
#include <pats/grasp.hpp>
#include <pats/http_api.hpp>
#include <pats/image_io.hpp>
#include <pats/pipeline.hpp>
#include <pats/point_cloud.hpp>
#include <pats/tree_io.hpp>

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::vector<double> parse_numbers(const std::string& s, std::size_t expected, const char* what)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw CLI::ValidationError(what, "expected " + std::to_string(expected) + " comma-separated numbers");
        }
    }
    if (out.size() != expected) {
        throw CLI::ValidationError(what, "expected " + std::to_string(expected) + " comma-separated numbers");
    }
    return out;
}

int run_map(const std::string& image_path, const std::string& out_path, const std::string& dump_tree,
            const std::string& load_tree_path, const std::string& labels_path, bool no_smooth, bool timing)
{
    const pats::ColorImage img = pats::load_color_image(image_path);
    pats::PipelineOptions opt;
    opt.smooth = !no_smooth;

    if (!labels_path.empty()) {
        pats::save_png(labels_path, pats::colorize_labels(pats::atomic_partition(img, opt)));
    }

    pats::StageTimings t;
    std::optional<pats::Segmentation> seg;
    if (!load_tree_path.empty()) {
        pats::PartitionTree tree = pats::load_tree(load_tree_path);
        if (tree.width != img.width() || tree.height != img.height()) {
            std::cerr << "pats map: tree " << load_tree_path << " does not match the image size\n";
            return 1;
        }
        seg.emplace(std::move(tree));
    } else {
        seg.emplace(pats::segment(img, opt, &t));
    }

    pats::save_png(out_path, seg->rendered);
    if (!dump_tree.empty()) pats::save_tree(dump_tree, seg->tree);
    if (timing) {
        std::fprintf(stderr,
                     "leaves %zu  colour %.2f ms  gradient %.2f ms  watershed %.2f ms  tree %.2f ms  "
                     "saliency %.2f ms  total %.2f ms\n",
                     seg->tree.leaf_count(), t.color_ms, t.gradient_ms, t.watershed_ms, t.tree_ms, t.saliency_ms,
                     t.total_ms());
    }
    return 0;
}

int run_eval(const std::vector<std::string>& preds, const std::vector<std::string>& gts,
             const std::vector<std::string>& names, const std::string& measure, double beta2,
             const std::string& report_path)
{
    if (preds.size() != gts.size()) {
        std::cerr << "pats eval: --pred and --gt must be given the same number of times\n";
        return 2;
    }
    if (!names.empty() && names.size() != preds.size()) {
        std::cerr << "pats eval: --name must be given once per dataset\n";
        return 2;
    }
    pats::BenchmarkReport report;
    report.measure = pats::parse_measure(measure);
    report.beta2 = beta2;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        std::filesystem::path gt_dir = std::filesystem::path(gts[i]).lexically_normal();
        if (!gt_dir.has_filename()) gt_dir = gt_dir.parent_path();  // trailing slash
        std::string name = names.empty() ? gt_dir.parent_path().filename().string() : names[i];
        if (name.empty() || name == "." || name == "..") name = "dataset" + std::to_string(i + 1);
        report.datasets.push_back(pats::evaluate_directories(name, preds[i], gts[i], report.measure, beta2));
    }
    report.overall = pats::overall_score(report.datasets);

    if (!report_path.empty()) {
        std::ofstream os(report_path);
        if (!os) {
            std::cerr << "pats eval: cannot write " << report_path << '\n';
            return 1;
        }
        pats::write_report_csv(os, report);
    }
    for (const auto& d : report.datasets) {
        std::size_t flagged = 0;
        for (const auto& r : d.images) flagged += !r.flags.empty();
        std::cout << d.name << ": " << d.images.size() << " images, mean " << d.mean << ", " << flagged
                  << " flagged, " << d.skipped.size() << " skipped\n";
        for (const auto& [stem, why] : d.skipped) std::cerr << "  skipped " << stem << ": " << why << '\n';
    }
    std::cout << pats::summary_line(report) << '\n';
    return report.skipped_count() == 0 ? 0 : 3;
}

httplib::Server* g_server = nullptr;

void on_signal(int)
{
    if (g_server) g_server->stop();
}

int run_serve(const std::string& host, int port, int ttl, const std::string& cache, const std::string& static_dir)
{
    pats::ServiceOptions opt;
    opt.session_ttl = std::chrono::seconds(ttl);
    opt.tree_cache_dir = cache;
    pats::SelectionService service(opt);
    httplib::Server server;
    pats::install_routes(server, service);
    if (!static_dir.empty() && !server.set_mount_point("/", static_dir)) {
        std::cerr << "pats serve: cannot serve static assets from " << static_dir << '\n';
        return 1;
    }
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "pats serve: listening on " << host << ':' << port << '\n';
    if (!server.listen(host, port)) {
        std::cerr << "pats serve: cannot listen on " << host << ':' << port << '\n';
        return 1;
    }
    return 0;
}

int run_grasp(const std::string& mask_path, const std::string& cloud_path, const std::string& click,
              const std::string& gravity_s, double top_threshold)
{
    const auto c = parse_numbers(click, 2, "--click");
    const auto g = parse_numbers(gravity_s, 3, "--gravity");
    pats::GraspRequest req;
    req.mask = pats::binarize_ground_truth(pats::load_gray_image(mask_path));
    req.point = {static_cast<int>(c[0]), static_cast<int>(c[1])};
    req.image_id = std::filesystem::path(mask_path).stem().string();
    if (!req.mask.contains(req.point) || !req.mask(req.point.x, req.point.y)) {
        std::cerr << "pats grasp: click lies outside the mask; choose a different grasp point\n";
        return 4;
    }
    const pats::OrderedPointCloud cloud = pats::load_cloud(cloud_path);
    pats::GraspParams params;
    params.top_threshold_deg = top_threshold;
    const pats::Vec3 gravity(g[0], g[1], g[2]);
    if (gravity.norm() == 0.0) {
        std::cerr << "pats grasp: gravity must be non-zero\n";
        return 2;
    }
    const pats::GraspSpec spec = pats::build_grasp_spec(req, cloud, gravity.normalized(), params);
    std::cout << pats::format_grasp_spec(spec);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Partition tree saliency: maps, evaluation, selection service, grasp geometry"};
    app.require_subcommand(1);

    auto* map = app.add_subcommand("map", "Write the normalised saliency map of an image");
    std::string map_image, map_out = "saliency.png", map_tree, map_load_tree, map_labels;
    bool no_smooth = false, timing = false;
    map->add_option("image", map_image, "Input PNG/JPEG")->required()->check(CLI::ExistingFile);
    map->add_option("-o,--output", map_out, "Output PNG");
    map->add_option("--dump-tree", map_tree, "Write the partition tree sidecar (.pats)");
    map->add_option("--load-tree", map_load_tree, "Reuse a partition tree sidecar instead of recomputing")
        ->check(CLI::ExistingFile);
    map->add_option("--labels", map_labels, "Write the atomic partition as a random-colour PNG");
    map->add_flag("--no-smooth", no_smooth, "Skip the 3x3 pre-smoothing");
    map->add_flag("--timing", timing, "Print per-stage timings to stderr");

    auto* eval = app.add_subcommand("eval", "Score saliency maps against ground truth");
    std::vector<std::string> preds, gts, names;
    std::string measure = "fbeta", report;
    double beta2 = pats::kDefaultBeta2;
    eval->add_option("--pred", preds, "Prediction directory (repeat per dataset)")->required();
    eval->add_option("--gt", gts, "Ground-truth directory (repeat per dataset)")->required();
    eval->add_option("--name", names, "Dataset name (repeat per dataset)");
    eval->add_option("--measure", measure, "fbeta or mcc")->check(CLI::IsMember({"fbeta", "mcc"}));
    eval->add_option("--beta2", beta2, "F-beta weight")->check(CLI::PositiveNumber);
    eval->add_option("--report", report, "Per-image CSV report");

    auto* serve = app.add_subcommand("serve", "Run the selection HTTP service");
    std::string host = "0.0.0.0", cache, static_dir;
    int port = 8080, ttl = 1800;
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
    serve->add_option("--session-ttl", ttl, "Idle session lifetime in seconds")->check(CLI::PositiveNumber);
    serve->add_option("--tree-cache", cache, "Directory for persisted partition trees");
    serve->add_option("--static", static_dir, "Directory of static UI assets served at /");

    auto* grasp = app.add_subcommand("grasp", "Compute grasp parameters from mask, cloud and click");
    std::string mask_path, cloud_path, click, gravity = "0,0,-1";
    double top_threshold = 25.0;
    grasp->add_option("--mask", mask_path, "Object mask PNG (>127 = object)")->required()->check(CLI::ExistingFile);
    grasp->add_option("--cloud", cloud_path, "Ordered point cloud (.pcraw)")->required()->check(CLI::ExistingFile);
    grasp->add_option("--click", click, "Grasp pixel x,y")->required();
    grasp->add_option("--gravity", gravity, "Gravity direction gx,gy,gz in the cloud frame");
    grasp->add_option("--top-threshold", top_threshold, "Max normal/gravity angle for a top grasp (degrees)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*map) return run_map(map_image, map_out, map_tree, map_load_tree, map_labels, no_smooth, timing);
        if (*eval) return run_eval(preds, gts, names, measure, beta2, report);
        if (*serve) return run_serve(host, port, ttl, cache, static_dir);
        if (*grasp) return run_grasp(mask_path, cloud_path, click, gravity, top_threshold);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const pats::GraspError& e) {
        std::cerr << "pats grasp: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "pats: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
