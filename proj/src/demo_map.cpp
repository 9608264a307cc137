#include "navsim/world.hpp"

namespace navsim {

namespace {

ObstaclePolygon rect(double x0, double y0, double x1, double y1) {
    return {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

} // namespace

// A 20x20 m single-floor layout: two wall stubs forming a doorway, plus
// furniture-sized blocks, with labelled objects scattered in free space.
WorldMap make_demo_map() {
    WorldMap map;
    map.bounds = {0.0, 0.0, 20.0, 20.0};

    map.obstacles.push_back(rect(2.5, 2.5, 5.5, 4.0));    // dining table block
    map.obstacles.push_back(rect(8.0, 0.0, 9.2, 7.0));    // south wall
    map.obstacles.push_back(rect(8.0, 9.5, 9.2, 20.0));   // north wall (door gap 7.0..9.5)
    map.obstacles.push_back(rect(12.5, 3.0, 16.5, 4.5));  // sofa block
    map.obstacles.push_back(rect(13.0, 8.0, 14.2, 12.5)); // shelf unit
    map.obstacles.push_back(rect(3.0, 8.5, 5.0, 10.5));   // bed block
    map.obstacles.push_back(rect(2.0, 14.0, 4.8, 15.2));  // desk block
    map.obstacles.push_back({{{11.5, 15.5}, {13.5, 15.5}, {12.5, 17.2}}}); // planter corner

    map.objects = {
        {"kitchen sink", {1.2, 1.2}},
        {"round table", {4.0, 4.8}},
        {"refrigerator", {1.0, 6.5}},
        {"rug", {10.5, 2.0}},
        {"sofa", {14.5, 5.2}},
        {"window", {19.0, 4.0}},
        {"door frame", {8.6, 8.25}},
        {"bed", {4.0, 11.3}},
        {"bookshelf", {12.4, 10.0}},
        {"floor lamp", {6.8, 12.0}},
        {"television", {17.5, 10.0}},
        {"desk chair", {3.4, 16.2}},
        {"potted plant", {12.5, 14.8}},
        {"washing machine", {17.0, 17.0}},
    };

    validate_map(map);
    return map;
}

} // namespace navsim
