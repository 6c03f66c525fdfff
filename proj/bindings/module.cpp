#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "irforge/pipeline.hpp"

namespace py = pybind11;
using namespace irforge;

namespace {

ImageBuffer to_image(const py::array_t<double, py::array::c_style |
                                                   py::array::forcecast>& a) {
    if (a.ndim() != 2) throw py::value_error("expected a 2D array");
    ImageBuffer img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    std::copy_n(a.data(), img.size(), img.data().data());
    return img;
}

py::array_t<double> from_image(const ImageBuffer& img) {
    py::array_t<double> a({img.height(), img.width()});
    std::copy_n(img.data().data(), img.size(), a.mutable_data());
    return a;
}

RegionMask to_mask(const py::array_t<bool, py::array::c_style |
                                              py::array::forcecast>& a) {
    if (a.ndim() != 2) throw py::value_error("expected a 2D array");
    RegionMask m(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    for (std::size_t i = 0; i < m.size(); ++i) m.set_index(i, a.data()[i]);
    return m;
}

py::array_t<bool> from_mask(const RegionMask& m) {
    py::array_t<bool> a({m.height(), m.width()});
    for (std::size_t i = 0; i < m.size(); ++i) a.mutable_data()[i] = m.test(i);
    return a;
}

LabelMap to_labels(const py::array_t<std::uint8_t, py::array::c_style |
                                                       py::array::forcecast>& a) {
    if (a.ndim() != 2) throw py::value_error("expected a 2D array");
    LabelMap l(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    std::copy_n(a.data(), l.size(), l.labels().data());
    return l;
}

py::dict metric_dict(const MetricSet& m) {
    py::dict d;
    d["rss"] = m.rss;
    d["qd"] = m.qd;
    d["scr"] = m.scr;
    d["rx"] = m.rx;
    d["k"] = m.k;
    d["delta_mu"] = m.delta_mu;
    return d;
}

ViewBundle make_bundle(const py::array_t<double>& ta,
                       const py::array_t<double>& tf,
                       const py::array_t<std::uint8_t>& regions,
                       const std::map<int, std::string>& names) {
    ViewBundle b;
    b.ta = to_image(ta);
    b.tf = to_image(tf);
    b.regions = to_labels(regions);
    for (const auto& [code, name] : names)
        b.region_names[static_cast<std::uint8_t>(code)] = name;
    return b;
}

} // namespace

PYBIND11_MODULE(_irforge, m) {
    m.doc() = "hybrid IR scene synthesis under image-quality constraints";

    m.def(
        "region_stats",
        [](const py::array_t<double>& img, const py::array_t<bool>& mask) {
            const RegionStats s = region_stats(to_image(img), to_mask(mask));
            return py::make_tuple(s.surface, s.mean, s.stddev);
        },
        py::arg("image"), py::arg("mask"),
        "surface, mean and population stddev of the masked pixels");

    m.def(
        "dilation_ring",
        [](const py::array_t<bool>& sil, int radius) {
            return from_mask(dilation_ring(to_mask(sil), radius));
        },
        py::arg("silhouette"), py::arg("radius"));

    m.def(
        "measure_metrics",
        [](const py::array_t<double>& img, const py::array_t<bool>& visible,
           const py::array_t<bool>& full, double nu_k, int f1_radius) {
            const ImageBuffer image = to_image(img);
            const RegionMask vis = to_mask(visible);
            SceneLayout layout;
            layout.frame_width = image.width();
            layout.frame_height = image.height();
            layout.target_visible = vis;
            layout.target_full = to_mask(full);
            layout.occultant = RegionMask(image.width(), image.height());
            RegionMask ring = dilation_ring(vis, f1_radius);
            layout.local_background =
                mask_ops(ring, layout.target_full, MaskOp::AndNot);
            RegionMask used = mask_ops(layout.target_full,
                                       layout.local_background, MaskOp::Or);
            RegionMask all(image.width(), image.height(), true);
            layout.remaining_background = mask_ops(all, used, MaskOp::AndNot);
            return metric_dict(measure_scene(image, layout, {nu_k}));
        },
        py::arg("image"), py::arg("visible"), py::arg("full"),
        py::arg("nu_k") = 1.0, py::arg("f1_radius") = kDefaultF1Radius);

    m.def(
        "mix",
        [](const py::array_t<double>& ta, const py::array_t<double>& tf,
           const py::array_t<std::uint8_t>& regions,
           const std::map<int, double>& lambdas) {
            ViewBundle b;
            b.ta = to_image(ta);
            b.tf = to_image(tf);
            b.regions = to_labels(regions);
            for (std::uint8_t l : b.regions.present_labels())
                b.region_names[l] = "region_" + std::to_string(l);
            ThermalState state;
            for (const auto& [code, lam] : lambdas)
                state[static_cast<std::uint8_t>(code)] = lam;
            return from_image(mix(b, state));
        },
        py::arg("ta"), py::arg("tf"), py::arg("regions"), py::arg("lambdas"));

    m.def(
        "sample_lambda",
        [](const std::string& mode, std::uint64_t seed, std::size_t count) {
            const ThermalMode tm = thermal_mode_from_string(mode);
            Rng rng(seed);
            py::array_t<double> out(static_cast<py::ssize_t>(count));
            for (std::size_t i = 0; i < count; ++i)
                out.mutable_data()[i] = sample_lambda(tm, rng);
            return out;
        },
        py::arg("mode"), py::arg("seed"), py::arg("count") = 1);

    m.def(
        "solve_background",
        [](double mean, double stddev, double rss, double scr, double nu_k) {
            SceneConstraints c;
            c.rss = rss;
            c.scr = scr;
            c.cal.nu_k = nu_k;
            const AffineTransform t =
                solve_background({1, mean, stddev}, c);
            return py::make_tuple(t.gain, t.offset);
        },
        py::arg("mean"), py::arg("stddev"), py::arg("rss"), py::arg("scr"),
        py::arg("nu_k") = 1.0);

    m.def(
        "solve_target",
        [](double mean, double stddev, double mu_f1_after, double rss,
           double k, double nu_k) {
            SceneConstraints c;
            c.rss = rss;
            c.scr = 1.0;
            c.k = k;
            c.cal.nu_k = nu_k;
            const AffineTransform t =
                solve_target({1, mean, stddev}, mu_f1_after, c);
            return py::make_tuple(t.gain, t.offset);
        },
        py::arg("mean"), py::arg("stddev"), py::arg("mu_f1_after"),
        py::arg("rss"), py::arg("k"), py::arg("nu_k") = 1.0);

    m.def(
        "gaussian_blur",
        [](const py::array_t<double>& img, double sigma) {
            SensorModel model;
            model.blur_sigma = sigma;
            return from_image(apply_mtf(to_image(img), model));
        },
        py::arg("image"), py::arg("sigma"));

    m.def(
        "add_noise",
        [](const py::array_t<double>& img, double sigma, std::uint64_t seed) {
            SensorModel model;
            model.noise_sigma = sigma;
            Rng rng(seed);
            return from_image(apply_noise(to_image(img), model, rng));
        },
        py::arg("image"), py::arg("sigma"), py::arg("seed"));

    m.def(
        "build_scene",
        [](const py::array_t<double>& background, const py::array_t<double>& ta,
           const py::array_t<double>& tf,
           const py::array_t<std::uint8_t>& regions,
           const std::map<int, std::string>& region_names, double rss,
           double scr, double k, double nu_k,
           const std::map<std::string, std::string>& thermal,
           std::uint64_t seed, double blur, double noise) {
            SceneAssets assets;
            assets.background = to_image(background);
            assets.bundle = make_bundle(ta, tf, regions, region_names);
            SceneRecipe recipe;
            recipe.scene_id = "python";
            recipe.constraints.rss = rss;
            recipe.constraints.scr = scr;
            recipe.constraints.k = k;
            recipe.constraints.cal.nu_k = nu_k;
            for (const auto& [name, mode] : thermal)
                recipe.mode_names[name] = thermal_mode_from_string(mode);
            recipe.seed = seed;
            recipe.sensor.blur_sigma = blur;
            recipe.sensor.noise_sigma = noise;
            const SceneResult res = build_scene(recipe, assets);
            py::dict out;
            out["pre_sensor"] = from_image(res.pre_sensor);
            out["post_sensor"] = from_image(res.post_sensor);
            out["mask_visible"] = from_mask(res.layout.target_visible);
            out["mask_full"] = from_mask(res.layout.target_full);
            out["record"] = py::module_::import("json").attr("loads")(
                record_to_json(res.record).dump());
            return out;
        },
        py::arg("background"), py::arg("ta"), py::arg("tf"), py::arg("regions"),
        py::arg("region_names"), py::arg("rss"), py::arg("scr"), py::arg("k"),
        py::arg("nu_k") = 1.0,
        py::arg("thermal") =
            std::map<std::string, std::string>{{"rest", "ambient"}},
        py::arg("seed") = 0, py::arg("blur") = 0.0, py::arg("noise") = 0.0);

    py::register_exception<Error>(m, "IrforgeError");
}
